//! Error type shared by all modules of the crate.

use alloc::string::String;

/// Errors produced by model construction, evaluation, fitting and batch runs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
#[non_exhaustive]
pub enum Error {
    /// A parameter vector (or box) has the wrong length for its model.
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch {
        /// Expected length (the ambient dimension `d`).
        expected: usize,
        /// Length actually supplied.
        got: usize,
    },

    /// A model family or spec violates a structural invariant.
    #[error("invalid model spec: {reason}")]
    InvalidSpec {
        /// Human-readable description of the violated invariant.
        reason: String,
    },

    /// An input value (observation or parameter) is NaN or infinite.
    #[error("non-finite value at index {index}")]
    NonFinite {
        /// Zero-based position of the offending value.
        index: usize,
    },

    /// A series is too short for the requested operation.
    #[error("series too short: n = {n}, need at least {min}")]
    SeriesTooShort {
        /// Observed length.
        n: usize,
        /// Minimum required length.
        min: usize,
    },

    /// A parameter point lies outside the stationarity region.
    #[error("parameter outside the stationarity region (margin {margin})")]
    Nonstationary {
        /// Slack of the contraction inequality; negative or -inf when
        /// violated (serialized as `null` in the -inf case).
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_util::neg_inf_as_null"))]
        margin: f64,
    },

    /// The simulation recursion produced a non-finite value.
    #[error("simulation diverged to a non-finite value at step {step}")]
    SimulationDiverged {
        /// One-based step index counted from the start of the burn-in.
        step: usize,
    },

    /// The likelihood evaluated to a non-finite value.
    #[error("quasi-likelihood became non-finite at observation {t}")]
    NonFiniteLikelihood {
        /// One-based observation index where the running sum degenerated.
        t: usize,
    },

    /// Every optimizer start failed to produce a finite objective value.
    #[error("optimization failed: no start reached a finite quasi-likelihood")]
    OptimizationFailed,

    /// Every candidate model in a selection run failed to fit.
    #[error("selection failed: every candidate model failed to fit")]
    SelectionFailed,

    /// A requested moment of the innovation law does not exist.
    #[error("innovation moment undefined: {reason}")]
    MomentUndefined {
        /// Which moment and why it is unavailable.
        reason: String,
    },

    /// A batch diagnostic was asked for with too little data.
    #[error("insufficient data: {reason}")]
    InsufficientData {
        /// What was missing.
        reason: String,
    },

    /// A penalty rule could not produce a value for the requested `n`.
    #[error("penalty undefined for n = {n}: {reason}")]
    PenaltyUndefined {
        /// Sample size for which the penalty was requested.
        n: usize,
        /// Why no value exists (e.g. missing entry of a tabulated rule).
        reason: String,
    },
}
