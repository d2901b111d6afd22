//! Pair-source statistics and the heralded single-photon state.
//!
//! The down-converter emits `n` pairs with probability `(1-chi^2) chi^(2n)`.
//! Measuring one arm with the two-port detector and keeping the herald
//! signature leaves the other arm in a state diagonal in photon number with
//! weights `(1-chi^2) chi^(2n) P_herald(n)`. Those weights are kept
//! unnormalised: their sum is the heralding probability and the `n = 1`
//! share is the single-photon fidelity.
//!
//! Infinite sums are truncated at a cutoff `N`. Since every `P_herald(n) <= 1`,
//! the omitted weight is at most `sum_{n>N} (1-chi^2) chi^(2n) = chi^(2(N+1))`,
//! which is carried along as `tail_bound`.

use crate::detector::{signature_prob, Signature, TwoPortConfig};
use crate::{Error, Result};

/// Truncation tolerance used when callers have no particular requirement.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Down-conversion strength `chi`, restricted to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SqueezingParam(f64);

impl SqueezingParam {
    pub fn new(chi: f64) -> Result<Self> {
        if chi.is_finite() && (0.0..1.0).contains(&chi) {
            Ok(Self(chi))
        } else {
            Err(Error::InvalidParameter {
                name: "chi",
                value: chi,
                reason: "must lie in [0, 1)",
            })
        }
    }

    pub fn chi(self) -> f64 {
        self.0
    }

    /// `chi^2`, the ratio of successive pair-number probabilities.
    pub fn ratio(self) -> f64 {
        self.0 * self.0
    }

    /// Probability mass beyond `cutoff` in the pair-number law, `chi^(2(cutoff+1))`.
    pub fn tail_beyond(self, cutoff: u32) -> f64 {
        let q = self.ratio();
        match cutoff.checked_add(1).and_then(|e| i32::try_from(e).ok()) {
            Some(e) => q.powi(e),
            None => q.powf(f64::from(cutoff) + 1.0),
        }
    }
}

/// Pair-number distribution `(1-chi^2) chi^(2n)` for `n = 0..=cutoff`.
pub fn pair_number_weights(chi: SqueezingParam, cutoff: u32) -> Vec<f64> {
    let q = chi.ratio();
    let mut w = 1.0 - q;
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    for _ in 0..=cutoff {
        out.push(w);
        w *= q;
    }
    out
}

/// Smallest cutoff `N` whose omitted pair-number mass `chi^(2(N+1))` is at
/// most `tolerance`.
pub fn auto_cutoff(chi: SqueezingParam, tolerance: f64) -> Result<u32> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: tolerance,
            reason: "must be a positive finite number",
        });
    }
    let q = chi.ratio();
    if q == 0.0 || q <= tolerance {
        return Ok(0);
    }
    // Start from the real-valued solution of (N+1) ln q = ln tol, then fix
    // up rounding so the result is exactly the smallest admissible N.
    let estimate = (tolerance.ln() / q.ln()).ceil() - 1.0;
    let mut n = estimate.clamp(0.0, f64::from(u32::MAX - 1)) as u32;
    while n > 0 && chi.tail_beyond(n - 1) <= tolerance {
        n -= 1;
    }
    while chi.tail_beyond(n) > tolerance {
        n += 1;
    }
    Ok(n)
}

/// Unnormalised heralded state, diagonal in photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    cutoff: u32,
    weights: Vec<f64>,
    tail_bound: f64,
}

impl ConditionalState {
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Weight of `|n><n|` for `n = 0..=cutoff`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Upper bound on the weight dropped beyond the cutoff.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Heralding probability of the truncated state.
    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn single_photon_weight(&self) -> f64 {
        self.weights.get(1).copied().unwrap_or(0.0)
    }
}

/// Heralded state truncated at an explicit cutoff.
pub fn conditional_state_with_cutoff(
    chi: SqueezingParam,
    cfg: &TwoPortConfig,
    cutoff: u32,
) -> ConditionalState {
    let weights = pair_number_weights(chi, cutoff)
        .into_iter()
        .zip(0..)
        .map(|(p, n)| p * signature_prob(n, Signature::HERALD, cfg))
        .collect();
    ConditionalState {
        cutoff,
        weights,
        tail_bound: chi.tail_beyond(cutoff),
    }
}

/// Heralded state truncated where the omitted weight is below `tolerance`.
pub fn conditional_state(
    chi: SqueezingParam,
    cfg: &TwoPortConfig,
    tolerance: f64,
) -> Result<ConditionalState> {
    let cutoff = auto_cutoff(chi, tolerance)?;
    Ok(conditional_state_with_cutoff(chi, cfg, cutoff))
}

/// Fidelity and heralding probability for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationReport {
    pub fidelity: f64,
    pub herald_probability: f64,
    pub cutoff: u32,
    /// Bound on the truncation error of both `fidelity` and
    /// `herald_probability`: `tail_bound / trace`.
    pub truncation_error: f64,
    pub tolerance: f64,
    pub chi: SqueezingParam,
    pub config: TwoPortConfig,
}

/// Evaluates the heralded source.
///
/// The cutoff starts at [`auto_cutoff`] and is raised once if needed so that
/// the relative truncation error `tail_bound / trace` is also below
/// `tolerance` (the fidelity is a ratio, so a small trace amplifies the
/// absolute tail).
///
/// Fails with [`Error::DegenerateHerald`] when `trace <= 10 * tail_bound`.
pub fn prepare(
    chi: SqueezingParam,
    cfg: &TwoPortConfig,
    tolerance: f64,
) -> Result<PreparationReport> {
    let mut state = conditional_state(chi, cfg, tolerance)?;
    let mut refined = false;
    loop {
        let trace = state.trace();
        let tail = state.tail_bound();
        if trace <= 10.0 * tail || trace <= 0.0 {
            return Err(Error::DegenerateHerald {
                trace,
                tail_bound: tail,
            });
        }
        let truncation_error = tail / trace;
        if truncation_error <= tolerance || refined {
            return Ok(PreparationReport {
                fidelity: (state.single_photon_weight() / trace).clamp(0.0, 1.0),
                herald_probability: trace.min(1.0),
                cutoff: state.cutoff(),
                truncation_error,
                tolerance,
                chi,
                config: *cfg,
            });
        }
        // trace can only grow with the cutoff, so one step is enough
        let cutoff = auto_cutoff(chi, (tolerance * trace).max(f64::MIN_POSITIVE))?;
        state = conditional_state_with_cutoff(chi, cfg, cutoff);
        refined = true;
    }
}
