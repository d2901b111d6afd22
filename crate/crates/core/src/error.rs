use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The herald weight is indistinguishable from the truncation error, so
    /// the fidelity ratio is undefined.
    #[error("degenerate herald: heralding probability {trace:e} does not exceed 10x the truncation bound {tail_bound:e}")]
    DegenerateHerald { trace: f64, tail_bound: f64 },

    #[error("no trial out of {trials} produced the herald signature")]
    ZeroHeralds { trials: u64 },

    #[error("every scanned splitting ratio gives a degenerate herald")]
    AllDegenerate,

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}
