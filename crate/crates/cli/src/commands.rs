use herald_core::analysis::{sweep_with, Axis, Spacing, SweepGrid};
use herald_core::mc::{self, McConfig};
use herald_core::{
    optimize_eta_ref, prepare, DetectorParams, Error, SqueezingParam, TwoPortConfig, Workers,
};

use crate::output::{write_records, Record};
use crate::{open_output, CommonArgs, Failure, McArgs, OptimizeArgs, Preset, SweepArgs};

/// Agreement threshold for `mc-check`, in standard errors.
const MC_SIGMAS: f64 = 5.0;

impl CommonArgs {
    fn squeezing(&self) -> Result<SqueezingParam, Failure> {
        Ok(SqueezingParam::new(self.chi)?)
    }

    fn detector(&self) -> Result<DetectorParams, Failure> {
        Ok(DetectorParams::new(self.loss, self.dark)?)
    }

    fn config(&self) -> Result<TwoPortConfig, Failure> {
        Ok(TwoPortConfig::symmetric(self.eta_ref, self.detector()?)?)
    }

    fn tolerance(&self) -> Result<f64, Failure> {
        if self.tolerance.is_finite() && self.tolerance > 0.0 {
            Ok(self.tolerance)
        } else {
            Err(Error::InvalidParameter {
                name: "tolerance",
                value: self.tolerance,
                reason: "must be a positive finite number",
            }
            .into())
        }
    }

    /// Validates every shared flag before any computation starts.
    fn validate(&self) -> Result<(), Failure> {
        self.squeezing()?;
        self.config()?;
        self.tolerance()?;
        Ok(())
    }

    fn stamp(&self, rec: Record) -> Record {
        if self.no_timestamp {
            rec
        } else {
            rec.with("timestamp", timestamp().as_str())
        }
    }

    fn emit(&self, records: &[Record]) -> Result<(), Failure> {
        let mut out = open_output(&self.output)?;
        write_records(&mut out, self.format, records)?;
        out.flush()?;
        Ok(())
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn fidelity(args: &CommonArgs) -> Result<(), Failure> {
    args.validate()?;
    let report = prepare(args.squeezing()?, &args.config()?, args.tolerance()?)?;
    let rec = Record::new()
        .with("fidelity", report.fidelity)
        .with("herald_prob", report.herald_probability)
        .with("cutoff", report.cutoff)
        .with("truncation_error", report.truncation_error)
        .with("chi", args.chi)
        .with("eta_ref", args.eta_ref)
        .with("loss", args.loss)
        .with("dark", args.dark)
        .with("tolerance", report.tolerance);
    args.emit(&[args.stamp(rec)])
}

fn build_grid(args: &SweepArgs) -> Result<SweepGrid, Failure> {
    let c = &args.common;
    let mut grid = match (args.axis, args.preset) {
        (Some(param), _) => {
            let axis = |param, from: Option<f64>, to: Option<f64>, points, log| Axis {
                param,
                start: from.unwrap_or_default(),
                stop: to.unwrap_or_default(),
                points,
                spacing: if log { Spacing::Log } else { Spacing::Linear },
            };
            let mut axes = vec![axis(param, args.from, args.to, args.points, args.log)];
            if let Some(p2) = args.axis2 {
                axes.push(axis(p2, args.from2, args.to2, args.points2, args.log2));
            }
            SweepGrid::new(c.chi, c.eta_ref, c.loss, c.dark, axes)
        }
        (None, Some(Preset::Fig2)) => SweepGrid::fig2(c.chi),
        (None, Some(Preset::Fig3)) => SweepGrid::fig3(c.chi),
        (None, Some(Preset::Fig1) | None) => SweepGrid::fig1(c.chi),
    };
    grid.eta_ref = c.eta_ref;
    grid.loss = c.loss;
    grid.dark = c.dark;
    grid.validate()?;
    Ok(grid)
}

pub fn sweep(args: &SweepArgs, workers: Workers) -> Result<(), Failure> {
    let c = &args.common;
    c.validate()?;
    let grid = build_grid(args)?;
    let result = sweep_with(&grid, c.tolerance()?, workers)?;

    let mut meta = format!(
        "# herald-sim {} sweep: chi={} eta_ref={} loss={} dark={} tolerance={} points={}",
        result.tool_version,
        grid.chi,
        grid.eta_ref,
        grid.loss,
        grid.dark,
        result.tolerance,
        result.points.len()
    );
    if !c.no_timestamp {
        meta.push_str(&format!(" timestamp={}", timestamp()));
    }
    eprintln!("{meta}");

    let records: Vec<Record> = result
        .points
        .iter()
        .map(|p| {
            let rec = grid
                .axes
                .iter()
                .zip(&p.coords)
                .fold(Record::new(), |r, (axis, &v)| r.with(axis.param.name(), v));
            rec.with("fidelity", p.fidelity)
                .with("herald_prob", p.herald_prob)
                .with("status", p.status.as_str())
        })
        .collect();
    c.emit(&records)
}

pub fn optimize(args: &OptimizeArgs) -> Result<(), Failure> {
    let c = &args.common;
    c.validate()?;
    let det = c.detector()?;
    let rep = optimize_eta_ref(c.squeezing()?, det, det, args.refine_tol)?;
    let rec = Record::new()
        .with("eta_ref_star", rep.eta_ref_star)
        .with("fidelity_star", rep.fidelity_star)
        .with("herald_prob_star", rep.herald_probability_star)
        .with("bracket_lo", rep.bracket.0)
        .with("bracket_hi", rep.bracket.1)
        .with("refine_tol", rep.refinement_tolerance)
        .with("interior", rep.interior)
        .with("chi", c.chi)
        .with("loss", c.loss)
        .with("dark", c.dark);
    c.emit(&[c.stamp(rec)])
}

pub fn mc_check(args: &McArgs, workers: Workers) -> Result<(), Failure> {
    let c = &args.common;
    c.validate()?;
    let (chi, cfg) = (c.squeezing()?, c.config()?);
    let mc_cfg = McConfig::new(args.trials, args.seed, chi, cfg)?;

    let analytic = prepare(chi, &cfg, c.tolerance()?)?;
    let est = mc::run_with(&mc_cfg, workers)?;

    let rows = [
        (
            "fidelity",
            analytic.fidelity,
            est.fidelity_hat,
            est.fidelity_se,
        ),
        (
            "herald_prob",
            analytic.herald_probability,
            est.herald_prob_hat,
            est.herald_prob_se,
        ),
    ];
    let mut all_pass = true;
    let records: Vec<Record> = rows
        .iter()
        .map(|&(name, exact, hat, se)| {
            let deviation = (hat - exact).abs() / se;
            let pass = deviation <= MC_SIGMAS;
            all_pass &= pass;
            let rec = Record::new()
                .with("quantity", name)
                .with("analytic", exact)
                .with("estimate", hat)
                .with("std_error", se)
                .with("deviation_se", deviation)
                .with("verdict", if pass { "PASS" } else { "FAIL" })
                .with("trials", args.trials)
                .with("heralds", est.herald_count)
                .with("seed", args.seed)
                .with("chi", c.chi)
                .with("eta_ref", c.eta_ref)
                .with("loss", c.loss)
                .with("dark", c.dark);
            c.stamp(rec)
        })
        .collect();
    c.emit(&records)?;
    if all_pass {
        eprintln!("PASS: analytic values within {MC_SIGMAS} standard errors");
        Ok(())
    } else {
        Err(Failure::McDisagreement)
    }
}
