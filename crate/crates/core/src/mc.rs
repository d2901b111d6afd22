//! Event-level Monte Carlo of the heralding experiment.
//!
//! Each trial draws a pair number from the source, routes every photon of the
//! heralding arm through the beamsplitter, applies per-photon loss and
//! per-detector dark counts, and records the resulting click pattern. Nothing
//! here reuses the analytic formulas, so agreement with [`crate::conditioning`]
//! is an independent check.
//!
//! Reproducibility: trials are cut into fixed blocks of [`BLOCK_SIZE`]. Block
//! `k` draws from a ChaCha8 stream seeded with `seed` and stream id `k`, and
//! block tallies are reduced in block order, so the estimate is a function of
//! `(config, seed, trials)` alone, whatever the worker count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conditioning::{auto_cutoff, SqueezingParam};
use crate::detector::{Signature, TwoPortConfig};
use crate::exec::{map_ordered, Workers};
use crate::{Error, Result};

/// Trials per independently seeded block.
pub const BLOCK_SIZE: u64 = 1 << 14;

/// Tail mass used to derive the default pair-number cap.
pub const PAIR_CAP_TAIL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub chi: SqueezingParam,
    pub cfg: TwoPortConfig,
    /// Sampled pair numbers above this are rejected and redrawn.
    pub pair_cap: u32,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, chi: SqueezingParam, cfg: TwoPortConfig) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            trials,
            seed,
            chi,
            cfg,
            pair_cap: auto_cutoff(chi, PAIR_CAP_TAIL)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    /// Fraction of heralded trials whose pair number was exactly one.
    pub fidelity_hat: f64,
    pub fidelity_se: f64,
    pub herald_prob_hat: f64,
    pub herald_prob_se: f64,
    pub herald_count: u64,
    pub single_photon_heralds: u64,
    signature_counts: [u64; 4],
}

impl McEstimate {
    pub fn count(&self, sig: Signature) -> u64 {
        self.signature_counts[sig.index()]
    }

    pub fn signature_counts(&self) -> impl Iterator<Item = (Signature, u64)> + '_ {
        Signature::ALL.into_iter().map(|s| (s, self.count(s)))
    }
}

/// Draws a pair number with probability `(1-chi^2) chi^(2n)`, `n <= pair_cap`.
///
/// Inverse-CDF sampling of the geometric law; draws beyond the cap are
/// rejected, which conditions the law on `n <= pair_cap`.
pub fn sample_pair_number<R: Rng + ?Sized>(chi: SqueezingParam, pair_cap: u32, rng: &mut R) -> u32 {
    let q = chi.ratio();
    if q == 0.0 {
        return 0;
    }
    let ln_q = q.ln();
    loop {
        // 1 - U lies in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        let n = (u.ln() / ln_q).floor();
        if n <= f64::from(pair_cap) {
            return n as u32;
        }
    }
}

/// Runs one trial with `n` photons in the heralding arm.
pub fn simulate_trial<R: Rng + ?Sized>(n: u32, cfg: &TwoPortConfig, rng: &mut R) -> Signature {
    let (d1, d2) = (cfg.detector_reflected(), cfg.detector_transmitted());
    let mut hit1 = false;
    let mut hit2 = false;
    for _ in 0..n {
        let reflected = rng.random::<f64>() < cfg.reflectivity();
        let det = if reflected { d1 } else { d2 };
        let survived = rng.random::<f64>() >= det.loss();
        if survived {
            if reflected {
                hit1 = true;
            } else {
                hit2 = true;
            }
        }
    }
    let dark1 = rng.random::<f64>() < d1.dark_count();
    let dark2 = rng.random::<f64>() < d2.dark_count();
    Signature::new(hit1 || dark1, hit2 || dark2)
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    signatures: [u64; 4],
    single_photon_heralds: u64,
}

impl Tally {
    fn merge(mut self, other: &Tally) -> Tally {
        for (a, b) in self.signatures.iter_mut().zip(other.signatures) {
            *a += b;
        }
        self.single_photon_heralds += other.single_photon_heralds;
        self
    }
}

fn run_block(mc: &McConfig, block: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(block);
    let start = block * BLOCK_SIZE;
    let len = BLOCK_SIZE.min(mc.trials - start);

    let mut tally = Tally::default();
    for _ in 0..len {
        let n = sample_pair_number(mc.chi, mc.pair_cap, &mut rng);
        let sig = simulate_trial(n, &mc.cfg, &mut rng);
        tally.signatures[sig.index()] += 1;
        if sig == Signature::HERALD && n == 1 {
            tally.single_photon_heralds += 1;
        }
    }
    tally
}

/// Binomial standard error of `successes / n`.
///
/// Wald estimate, except at 0 or n successes where Wald collapses to zero;
/// there the Agresti-Coull adjusted proportion is used instead.
pub fn binomial_se(successes: u64, n: u64) -> f64 {
    let (x, n) = (successes as f64, n as f64);
    if successes == 0 || x == n {
        let n_adj = n + 4.0;
        let p = (x + 2.0) / n_adj;
        return (p * (1.0 - p) / n_adj).sqrt();
    }
    let p = x / n;
    (p * (1.0 - p) / n).sqrt()
}

/// Runs the simulation on all available workers.
pub fn run(mc: &McConfig) -> Result<McEstimate> {
    run_with(mc, Workers::Auto)
}

/// Runs the simulation with an explicit worker setting. The result does not
/// depend on `workers`.
pub fn run_with(mc: &McConfig, workers: Workers) -> Result<McEstimate> {
    if mc.trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let blocks: Vec<u64> = (0..mc.trials.div_ceil(BLOCK_SIZE)).collect();
    let tally = map_ordered(&blocks, workers, |&b| run_block(mc, b))
        .iter()
        .fold(Tally::default(), Tally::merge);

    let heralds = tally.signatures[Signature::HERALD.index()];
    if heralds == 0 {
        return Err(Error::ZeroHeralds { trials: mc.trials });
    }
    Ok(McEstimate {
        trials: mc.trials,
        fidelity_hat: tally.single_photon_heralds as f64 / heralds as f64,
        fidelity_se: binomial_se(tally.single_photon_heralds, heralds),
        herald_prob_hat: heralds as f64 / mc.trials as f64,
        herald_prob_se: binomial_se(heralds, mc.trials),
        herald_count: heralds,
        single_photon_heralds: tally.single_photon_heralds,
        signature_counts: tally.signatures,
    })
}
