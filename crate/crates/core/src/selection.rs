//! Penalized-contrast model selection.
//!
//! Every candidate `m` is scored by `C(m) = -2 * L_n(theta_hat(m)) + |m| * kappa_n`
//! and the minimizer wins.  The regularization sequence `kappa_n` decides the
//! asymptotics: selection is strongly consistent when `kappa_n / ln ln n`
//! diverges while `kappa_n / n` vanishes.  BIC (`kappa_n = ln n`) satisfies
//! both; AIC (`kappa_n = 2`) fails the first and systematically overfits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::qmle::{fit, FitOptions, FitResult};
use crate::simulate::{derive_seed, Trajectory};
use crate::spec::ModelSpec;
use crate::Result;

/// A regularization sequence `kappa_n`, defined for `n >= 8`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", rename_all = "snake_case"))]
pub enum PenaltyRule {
    /// `kappa_n = ln n` (consistent).
    Bic,
    /// `kappa_n = 2` (not consistent: overfits with positive probability).
    Aic,
    /// `kappa_n = c * (ln ln n)^(1 + delta)`; consistent for `delta > 0`.
    LogLogPower {
        /// Positive scale factor.
        c: f64,
        /// Exponent offset; the divergence condition needs `delta > 0`.
        delta: f64,
    },
    /// `kappa_n = n^alpha` with `0 < alpha < 1` (consistent).
    PowerLaw {
        /// Exponent in `(0, 1)`.
        alpha: f64,
    },
    /// Explicitly tabulated `(n, kappa_n)` pairs; exact-`n` lookup.
    Custom {
        /// Tabulated values; every `kappa` must be positive and finite.
        table: Vec<(usize, f64)>,
    },
}

impl PenaltyRule {
    /// The penalty weight at sample size `n`.
    ///
    /// # Errors
    ///
    /// [`Error::PenaltyUndefined`] for `n < 8`, invalid rule parameters, or
    /// a missing/non-positive tabulated value.
    pub fn kappa(&self, n: usize) -> Result<f64> {
        if n < 8 {
            return Err(Error::PenaltyUndefined {
                n,
                reason: "penalties are defined for n >= 8".into(),
            });
        }
        match *self {
            PenaltyRule::Bic => Ok(math::ln(n as f64)),
            PenaltyRule::Aic => Ok(2.0),
            PenaltyRule::LogLogPower { c, delta } => {
                if !(c > 0.0) || !c.is_finite() || !delta.is_finite() {
                    return Err(Error::PenaltyUndefined {
                        n,
                        reason: format!("invalid loglog-power parameters c = {c}, delta = {delta}"),
                    });
                }
                Ok(c * math::powf(math::ln_ln(n), 1.0 + delta))
            }
            PenaltyRule::PowerLaw { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::PenaltyUndefined {
                        n,
                        reason: format!("power-law exponent must lie in (0, 1), got {alpha}"),
                    });
                }
                Ok(math::powf(n as f64, alpha))
            }
            PenaltyRule::Custom { ref table } => match table.iter().find(|(m, _)| *m == n) {
                Some(&(_, kappa)) if kappa > 0.0 && kappa.is_finite() => Ok(kappa),
                Some(&(_, kappa)) => Err(Error::PenaltyUndefined {
                    n,
                    reason: format!("tabulated kappa must be positive and finite, got {kappa}"),
                }),
                None => Err(Error::PenaltyUndefined {
                    n,
                    reason: "no tabulated value for this sample size".into(),
                }),
            },
        }
    }

    /// Short display name for reports.
    pub fn name(&self) -> String {
        match *self {
            PenaltyRule::Bic => "BIC".into(),
            PenaltyRule::Aic => "AIC".into(),
            PenaltyRule::LogLogPower { c, delta } => {
                format!("loglog_power(c={c},delta={delta})")
            }
            PenaltyRule::PowerLaw { alpha } => format!("power_law(alpha={alpha})"),
            PenaltyRule::Custom { .. } => "custom".into(),
        }
    }

    /// The two asymptotic consistency conditions, evaluated symbolically per
    /// rule (`None` when the rule is tabulated and the limit is unknowable).
    pub fn theorem_conditions(&self) -> TheoremConditions {
        let (diverges, vanishes) = match *self {
            PenaltyRule::Bic => (Some(true), Some(true)),
            PenaltyRule::Aic => (Some(false), Some(true)),
            PenaltyRule::LogLogPower { delta, .. } => (Some(delta > 0.0), Some(true)),
            PenaltyRule::PowerLaw { alpha } => {
                (Some(alpha > 0.0), Some(alpha < 1.0))
            }
            PenaltyRule::Custom { .. } => (None, None),
        };
        TheoremConditions {
            kappa_over_loglog_diverges: diverges,
            kappa_over_n_vanishes: vanishes,
        }
    }
}

/// Whether a rule satisfies the asymptotic hypotheses of the consistency
/// theorem: `kappa_n / ln ln n -> infinity` and `kappa_n / n -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremConditions {
    /// `kappa_n / ln ln n -> infinity`?
    pub kappa_over_loglog_diverges: Option<bool>,
    /// `kappa_n / n -> 0`?
    pub kappa_over_n_vanishes: Option<bool>,
}

/// The penalized contrast `C(m) = -2 * l_hat + |m| * kappa_n`.
pub fn criterion(l_hat: f64, model_dim: usize, kappa_n: f64) -> f64 {
    -2.0 * l_hat + model_dim as f64 * kappa_n
}

/// One candidate's record in a [`SelectionReport`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionEntry {
    /// The candidate model.
    pub spec: ModelSpec,
    /// Its fit, when one was obtained.
    pub fit: Option<FitResult>,
    /// Why the fit failed, when it did.
    pub error: Option<Error>,
    /// `C(m)`; `+inf` for infeasible candidates (serialized as `null`).
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_util::inf_as_null"))]
    pub criterion: f64,
}

/// Full audit record of one selection run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionReport {
    /// Per-candidate records, in collection order.
    pub entries: Vec<SelectionEntry>,
    /// Index of the selected candidate in `entries`.
    pub chosen: usize,
    /// Sample size the criteria were computed at.
    pub n: usize,
    /// Penalty weight used.
    pub kappa_n: f64,
    /// The rule that produced `kappa_n`.
    pub penalty: PenaltyRule,
    /// Symbolic consistency-condition flags for `penalty`.
    pub theorem_conditions: TheoremConditions,
}

impl SelectionReport {
    /// The selected model.
    pub fn chosen_spec(&self) -> &ModelSpec {
        &self.entries[self.chosen].spec
    }

    /// The selected model's fit.
    pub fn chosen_fit(&self) -> &FitResult {
        self.entries[self.chosen].fit.as_ref().expect("chosen entries are always feasible")
    }
}

/// Derives the fit seed for one candidate from the run seed and the
/// candidate's structure (family, orders, active set).  Structurally
/// identical candidates therefore receive bit-identical fits, which makes
/// exact criterion ties — and the documented tie-break — reproducible.
pub(crate) fn model_stream(spec: &ModelSpec) -> u64 {
    // FNV-1a over the structure, stable across platforms.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    let (tag, orders) = match spec.family() {
        crate::family::ModelFamily::Ar { p } => (1, [p, 0, 0, 0]),
        crate::family::ModelFamily::Arch { q } => (2, [q, 0, 0, 0]),
        crate::family::ModelFamily::Garch { p, q } => (3, [p, q, 0, 0]),
        crate::family::ModelFamily::Tarch { q } => (4, [q, 0, 0, 0]),
        crate::family::ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
            (5, [p, q, big_p, big_q])
        }
    };
    eat(tag);
    for o in orders {
        eat(o as u64);
    }
    for &i in spec.active() {
        eat(i as u64);
    }
    h
}

/// Fits every candidate in `collection` on `x`, recording per-candidate
/// failures instead of aborting.  Each candidate's starts are seeded by
/// `derive_seed(opts.seed, model_stream)`, so results do not depend on
/// evaluation order.
///
/// # Errors
///
/// An empty collection or candidates of differing ambient dimension.
pub fn fit_collection(
    collection: &[ModelSpec],
    x: &Trajectory,
    opts: &FitOptions,
) -> Result<Vec<(ModelSpec, core::result::Result<FitResult, Error>)>> {
    if collection.is_empty() {
        return Err(Error::InvalidSpec { reason: "candidate collection is empty".into() });
    }
    let d = collection[0].ambient_dim();
    if let Some(bad) = collection.iter().find(|s| s.ambient_dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.ambient_dim() });
    }
    Ok(collection
        .iter()
        .map(|spec| {
            let model_opts =
                FitOptions { seed: derive_seed(opts.seed, model_stream(spec)), ..*opts };
            (spec.clone(), fit(spec, x, &model_opts))
        })
        .collect())
}

/// Scores already-computed fits under `penalty` at sample size `n` and
/// chooses the winner.  Pure re-scoring: comparing several penalties on the
/// same data requires no refitting.
///
/// The argmin tie-break is: smaller criterion, then smaller model dimension,
/// then lexicographically smaller active set, then lower collection index.
///
/// # Errors
///
/// [`Error::SelectionFailed`] when every candidate is infeasible, and
/// penalty-evaluation errors.
pub fn select_from_fits(
    fits: &[(ModelSpec, core::result::Result<FitResult, Error>)],
    n: usize,
    penalty: &PenaltyRule,
) -> Result<SelectionReport> {
    let kappa_n = penalty.kappa(n)?;
    let entries = score_entries(fits, kappa_n);
    let chosen = choose(&entries)?;
    Ok(SelectionReport {
        entries,
        chosen,
        n,
        kappa_n,
        penalty: penalty.clone(),
        theorem_conditions: penalty.theorem_conditions(),
    })
}

fn score_entries(
    fits: &[(ModelSpec, core::result::Result<FitResult, Error>)],
    kappa_n: f64,
) -> Vec<SelectionEntry> {
    fits.iter()
        .map(|(spec, outcome)| match outcome {
            Ok(fit) => SelectionEntry {
                spec: spec.clone(),
                criterion: criterion(fit.l_hat, spec.model_dim(), kappa_n),
                fit: Some(fit.clone()),
                error: None,
            },
            Err(e) => SelectionEntry {
                spec: spec.clone(),
                fit: None,
                error: Some(e.clone()),
                criterion: f64::INFINITY,
            },
        })
        .collect()
}

fn choose(entries: &[SelectionEntry]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        if !e.criterion.is_finite() {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (bc, be) = (entries[b].criterion, &entries[b]);
                e.criterion < bc
                    || (e.criterion == bc
                        && (e.spec.model_dim() < be.spec.model_dim()
                            || (e.spec.model_dim() == be.spec.model_dim()
                                && e.spec.active() < be.spec.active())))
            }
        };
        if better {
            best = Some(i);
        }
    }
    best.ok_or(Error::SelectionFailed)
}

/// Fits the whole collection on `x` and selects under `penalty`.
///
/// # Errors
///
/// As [`fit_collection`] and [`select_from_fits`].
pub fn select(
    collection: &[ModelSpec],
    x: &Trajectory,
    penalty: &PenaltyRule,
    opts: &FitOptions,
) -> Result<SelectionReport> {
    let fits = fit_collection(collection, x, opts)?;
    select_from_fits(&fits, x.len(), penalty)
}
