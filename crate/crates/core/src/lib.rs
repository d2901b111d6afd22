//! Heralded single-photon preparation from a down-conversion pair source,
//! conditioned on one click pattern of a two-port bucket-detector network.
//!
//! The crate is organised bottom-up:
//!
//! - [`detector`]: click-pattern probabilities of the beamsplitter plus two
//!   on/off detectors, and the diagonal POVM table built from them.
//! - [`conditioning`]: pair-number law of the source, the unnormalised
//!   heralded state, and fidelity / heralding probability with a certified
//!   truncation bound.
//! - [`mc`]: an event-level Monte Carlo of the whole experiment, used as an
//!   independent check of the analytic path.
//! - [`analysis`]: parameter sweeps, the fidelity/success trade-off and the
//!   splitting-ratio optimiser.
//!
//! Data-parallel loops (sweep points, Monte Carlo blocks) run on rayon when
//! the `parallel` feature is enabled and fall back to plain iteration
//! otherwise; see [`exec::Workers`].

pub mod analysis;
pub mod conditioning;
pub mod detector;
mod error;
pub mod exec;
pub mod mc;
pub(crate) mod optim;

pub use analysis::{
    optimize_eta_ref, sweep, tradeoff_curve, Axis, OptimumReport, Param, Spacing, SweepGrid,
    SweepPoint, SweepResult, SweepStatus, TradeoffCurve, TradeoffPoint,
};
pub use conditioning::{
    auto_cutoff, conditional_state, pair_number_weights, prepare, ConditionalState,
    PreparationReport, SqueezingParam, DEFAULT_TOLERANCE,
};
pub use detector::{
    herald_prob_table, signature_prob, single_detector_click_prob, DetectorParams, Signature,
    SignatureTable, TwoPortConfig,
};
pub use error::{Error, Result};
pub use exec::Workers;
pub use mc::{McConfig, McEstimate};

/// Checks that `value` is a probability, naming the offending parameter otherwise.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
