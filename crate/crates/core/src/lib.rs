//! Affine causal time-series modelling with Gaussian quasi-likelihood.
//!
//! This crate implements a family of conditionally heteroskedastic time-series
//! models of the common affine causal form
//!
//! ```text
//! X_t = M_theta(X_{t-1}, X_{t-2}, ...) * xi_t + f_theta(X_{t-1}, X_{t-2}, ...)
//! ```
//!
//! where `f_theta` is the conditional mean, `M_theta` the conditional scale
//! (`H_theta = M_theta^2` the conditional variance) and `(xi_t)` are iid
//! innovations with mean 0 and variance 1.  Concrete families: AR(p), ARCH(q),
//! GARCH(p,q), threshold ARCH (TARCH), and ARMA-GARCH.
//!
//! On top of the model recursions the crate provides
//!
//! * [`simulate`]: stationary trajectory generation with burn-in and
//!   reproducible seeding ([`simulate::simulate`]);
//! * [`likelihood`]: the truncated ("zero past") Gaussian quasi-log-likelihood
//!   `L_n(theta) = -1/2 * sum_t q_t(theta)` with
//!   `q_t = (X_t - f_t)^2 / H_t + ln H_t`;
//! * [`qmle`]: bound-constrained, multi-start Nelder-Mead maximization of the
//!   quasi-likelihood over the active coordinates of a model;
//! * [`selection`]: penalized-contrast model selection
//!   `C(m) = -2 L_n(theta_hat(m)) + |m| * kappa_n` over a model collection;
//! * [`montecarlo`]: batch experiments measuring selection frequencies, the
//!   `sqrt(n / ln ln n)`-normalized estimation error, and the overfitting gap
//!   between nested fits, together with robust trend verdicts ([`trend`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only switches the math backend from `libm` to the standard library.
//! All operations are deterministic functions of their inputs, including
//! every random-number draw, which is derived from explicit 64-bit seeds.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod collection;
pub mod error;
pub mod family;
pub mod likelihood;
mod math;
pub mod moments;
pub mod montecarlo;
pub mod qmle;
pub mod selection;
#[cfg(feature = "serde")]
mod serde_util;
pub mod simulate;
pub mod spec;
pub mod stationarity;
pub mod trend;

pub use collection::{build_collection, CollectionMode, FamilyGrid};
pub use error::Error;
pub use family::ModelFamily;
pub use likelihood::{lhat_n, lhat_n_with_terms, qhat_t, LikelihoodValue};
pub use moments::{hat_moments, ConditionalMoments};
pub use montecarlo::{
    aggregate, lil_summary, lil_summary_selected, run_experiment, run_replication,
    ExperimentConfig, ExperimentReport, LilSummary, PenaltyOutcome, ReplicationAtN,
    ReplicationOutcome,
};
pub use qmle::{fit, lil_statistic, FitOptions, FitResult};
pub use selection::{
    criterion, fit_collection, select, select_from_fits, PenaltyRule, SelectionEntry,
    SelectionReport, TheoremConditions,
};
pub use simulate::{
    derive_seed, simulate, simulate_unchecked, InnovationLaw, Trajectory, TrajectoryMeta,
};
pub use spec::{ModelSpec, ParamBox, ParamVector};
pub use stationarity::{check_theta_r, StationarityCheck};
pub use trend::{trend_over_log_n, TrendSummary, Verdict};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
