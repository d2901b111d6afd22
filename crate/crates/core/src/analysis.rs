//! Parameter sweeps, the fidelity/success trade-off, and optimisation of the
//! splitting ratio.
//!
//! Every grid point is an independent [`prepare`] call, so sweeps and the
//! optimiser's coarse scan are evaluated through [`map_ordered`]: concurrently
//! when allowed, but always returned in grid order.

use std::fmt;
use std::str::FromStr;

use crate::conditioning::{prepare, PreparationReport, SqueezingParam, DEFAULT_TOLERANCE};
use crate::detector::{DetectorParams, TwoPortConfig};
use crate::exec::{map_ordered, Workers};
use crate::optim::golden_section_maximize;
use crate::{check_probability, Error, Result};

/// A sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    EtaRef,
    Loss,
    Dark,
}

impl Param {
    /// Column name used in tabular output.
    pub fn name(self) -> &'static str {
        match self {
            Param::EtaRef => "eta_ref",
            Param::Loss => "loss",
            Param::Dark => "dark",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta_ref" | "eta-ref" => Ok(Param::EtaRef),
            "loss" => Ok(Param::Loss),
            "dark" => Ok(Param::Dark),
            other => Err(Error::InvalidGrid(format!(
                "unknown axis `{other}` (expected eta_ref, loss or dark)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: Param, start: f64, stop: f64, points: usize) -> Self {
        Self {
            param,
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(param: Param, start: f64, stop: f64, points: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            ..Self::linear(param, start, stop, points)
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGrid(format!("axis {}: {msg}", self.param)));
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.start > self.stop {
            return bad(format!("start {} exceeds stop {}", self.start, self.stop));
        }
        if self.points < 2 {
            return bad(format!("needs at least 2 points, got {}", self.points));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return bad("log spacing needs a positive start".into());
        }
        if self.start < 0.0 || self.stop > 1.0 {
            return bad(format!(
                "[{}, {}] is not inside [0, 1]",
                self.start, self.stop
            ));
        }
        Ok(())
    }

    /// Grid values, with both endpoints hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.points - 1 {
                    return self.stop;
                }
                let frac = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * frac,
                    Spacing::Log => {
                        let (a, b) = (self.start.ln(), self.stop.ln());
                        (a + (b - a) * frac).exp()
                    }
                }
            })
            .collect()
    }
}

/// One- or two-dimensional grid over `{eta_ref, loss, dark}`.
///
/// Parameters not named by an axis keep the fixed values given here. Both
/// detectors share `loss` and `dark`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub chi: f64,
    pub eta_ref: f64,
    pub loss: f64,
    pub dark: f64,
    pub axes: Vec<Axis>,
}

impl SweepGrid {
    pub fn new(chi: f64, eta_ref: f64, loss: f64, dark: f64, axes: Vec<Axis>) -> Self {
        Self {
            chi,
            eta_ref,
            loss,
            dark,
            axes,
        }
    }

    /// Fidelity against splitting ratio, ideal detectors.
    pub fn fig1(chi: f64) -> Self {
        Self::new(
            chi,
            0.5,
            0.0,
            0.0,
            vec![Axis::linear(Param::EtaRef, 0.01, 1.0, 100)],
        )
    }

    /// Fidelity against loss at splitting ratios 0.1 and 0.5.
    pub fn fig2(chi: f64) -> Self {
        Self::new(
            chi,
            0.5,
            0.0,
            0.0,
            vec![
                Axis::linear(Param::EtaRef, 0.1, 0.5, 2),
                Axis::linear(Param::Loss, 0.0, 0.99, 100),
            ],
        )
    }

    /// Fidelity against dark-count rate and splitting ratio, lossless.
    pub fn fig3(chi: f64) -> Self {
        Self::new(
            chi,
            0.5,
            0.0,
            0.0,
            vec![
                Axis::log(Param::Dark, 1e-8, 1e-2, 50),
                Axis::linear(Param::EtaRef, 0.01, 1.0, 50),
            ],
        )
    }

    pub fn validate(&self) -> Result<()> {
        SqueezingParam::new(self.chi)?;
        check_probability("eta_ref", self.eta_ref)?;
        check_probability("loss", self.loss)?;
        check_probability("dark", self.dark)?;
        match self.axes.as_slice() {
            [] => return Err(Error::InvalidGrid("at least one axis is required".into())),
            [a, b] if a.param == b.param => {
                return Err(Error::InvalidGrid(format!("axis {} given twice", a.param)))
            }
            [_] | [_, _] => {}
            _ => return Err(Error::InvalidGrid("at most two axes are supported".into())),
        }
        self.axes.iter().try_for_each(Axis::validate)
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates in row-major order (first axis outermost).
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let mut coords = vec![Vec::new()];
        for axis in &self.axes {
            let values = axis.values();
            coords = coords
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        coords
    }

    fn point_params(&self, coords: &[f64]) -> (f64, f64, f64) {
        let (mut eta_ref, mut loss, mut dark) = (self.eta_ref, self.loss, self.dark);
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.param {
                Param::EtaRef => eta_ref = v,
                Param::Loss => loss = v,
                Param::Dark => dark = v,
            }
        }
        (eta_ref, loss, dark)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Ok,
    Degenerate,
}

impl SweepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepStatus::Ok => "ok",
            SweepStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// One value per grid axis, in axis order.
    pub coords: Vec<f64>,
    /// `None` for degenerate points.
    pub fidelity: Option<f64>,
    /// Heralding probability; for degenerate points the truncated trace.
    pub herald_prob: f64,
    pub status: SweepStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub tolerance: f64,
    pub tool_version: &'static str,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn fidelities(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.fidelity).collect()
    }
}

fn evaluate(
    chi: SqueezingParam,
    cfg: &TwoPortConfig,
    tolerance: f64,
) -> Result<(Option<f64>, f64)> {
    match prepare(chi, cfg, tolerance) {
        Ok(PreparationReport {
            fidelity,
            herald_probability,
            ..
        }) => Ok((Some(fidelity), herald_probability)),
        Err(Error::DegenerateHerald { trace, .. }) => Ok((None, trace)),
        Err(e) => Err(e),
    }
}

/// Evaluates every point of `grid` on all available workers.
pub fn sweep(grid: &SweepGrid, tolerance: f64) -> Result<SweepResult> {
    sweep_with(grid, tolerance, Workers::Auto)
}

pub fn sweep_with(grid: &SweepGrid, tolerance: f64, workers: Workers) -> Result<SweepResult> {
    grid.validate()?;
    let chi = SqueezingParam::new(grid.chi)?;
    let coords = grid.coordinates();
    let points = map_ordered(&coords, workers, |c| {
        let (eta_ref, loss, dark) = grid.point_params(c);
        let cfg = TwoPortConfig::symmetric(eta_ref, DetectorParams::new(loss, dark)?)?;
        let (fidelity, herald_prob) = evaluate(chi, &cfg, tolerance)?;
        Ok(SweepPoint {
            coords: c.clone(),
            fidelity,
            herald_prob,
            status: if fidelity.is_some() {
                SweepStatus::Ok
            } else {
                SweepStatus::Degenerate
            },
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        grid: grid.clone(),
        tolerance,
        tool_version: env!("CARGO_PKG_VERSION"),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub eta_ref: f64,
    pub fidelity: f64,
    pub herald_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TradeoffCurve {
    pub points: Vec<TradeoffPoint>,
    /// Splitting ratios left out because the herald was degenerate there.
    pub degenerate: Vec<f64>,
}

/// Fidelity and heralding probability along a list of splitting ratios.
pub fn tradeoff_curve(
    chi: SqueezingParam,
    reflected: DetectorParams,
    transmitted: DetectorParams,
    eta_ref_grid: &[f64],
    tolerance: f64,
) -> Result<TradeoffCurve> {
    let evaluated = map_ordered(eta_ref_grid, Workers::Auto, |&r| {
        let cfg = TwoPortConfig::new(r, reflected, transmitted)?;
        evaluate(chi, &cfg, tolerance).map(|(f, p)| (r, f, p))
    });
    let mut curve = TradeoffCurve::default();
    for item in evaluated {
        match item? {
            (eta_ref, Some(fidelity), herald_probability) => curve.points.push(TradeoffPoint {
                eta_ref,
                fidelity,
                herald_probability,
            }),
            (eta_ref, None, _) => curve.degenerate.push(eta_ref),
        }
    }
    Ok(curve)
}

/// Number of evenly spaced splitting ratios in the optimiser's coarse scan.
pub const COARSE_SCAN_POINTS: usize = 1024;

/// Default refinement tolerance on the splitting ratio.
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    pub eta_ref_star: f64,
    pub fidelity_star: f64,
    pub herald_probability_star: f64,
    /// Neighbours of the best coarse point, inside which refinement ran.
    pub bracket: (f64, f64),
    pub refinement_tolerance: f64,
    /// Whether the maximum sits strictly inside `(0, 1)`. When it does not,
    /// the fidelity is still rising toward the domain edge and
    /// `eta_ref_star` is the outermost scanned point.
    pub interior: bool,
}

/// Maximises the fidelity over the splitting ratio.
///
/// A coarse scan over `k / 1024, k = 1..=1024` picks the best point, then a
/// golden-section search refines it inside its two scan neighbours. No
/// unimodality is assumed beyond that bracket.
pub fn optimize_eta_ref(
    chi: SqueezingParam,
    reflected: DetectorParams,
    transmitted: DetectorParams,
    refinement_tolerance: f64,
) -> Result<OptimumReport> {
    if !(refinement_tolerance.is_finite() && refinement_tolerance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "refinement_tolerance",
            value: refinement_tolerance,
            reason: "must be a positive finite number",
        });
    }
    let eval = |r: f64| -> Result<Option<(f64, f64)>> {
        let cfg = TwoPortConfig::new(r, reflected, transmitted)?;
        Ok(match evaluate(chi, &cfg, DEFAULT_TOLERANCE)? {
            (Some(f), p) => Some((f, p)),
            (None, _) => None,
        })
    };

    let n = COARSE_SCAN_POINTS;
    let scan: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
    let coarse = map_ordered(&scan, Workers::Auto, |&r| eval(r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let (best, best_val) = coarse
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, (f64, f64))>, (i, v)| match acc {
            Some((_, (f, _))) if f >= v.0 => acc,
            _ => Some((i, v)),
        })
        .ok_or(Error::AllDegenerate)?;

    let lo = if best == 0 { 0.0 } else { scan[best - 1] };
    let hi = scan.get(best + 1).copied().unwrap_or(1.0);
    let objective = |r: f64| match eval(r) {
        Ok(Some((f, _))) => f,
        _ => f64::NEG_INFINITY,
    };
    let (x_ref, f_ref) = golden_section_maximize(objective, lo, hi, refinement_tolerance);

    let at_left_edge = best == 0 && x_ref <= refinement_tolerance;
    let at_right_edge = best == n - 1 && x_ref >= 1.0 - refinement_tolerance;
    let interior = !(at_left_edge || at_right_edge);

    let (eta_ref_star, (fidelity_star, herald_probability_star)) = if interior && f_ref > best_val.0
    {
        let herald = eval(x_ref)?.map_or(0.0, |(_, p)| p);
        (x_ref, (f_ref, herald))
    } else {
        (scan[best], best_val)
    };

    Ok(OptimumReport {
        eta_ref_star,
        fidelity_star,
        herald_probability_star,
        bracket: (lo, hi),
        refinement_tolerance,
        interior,
    })
}
