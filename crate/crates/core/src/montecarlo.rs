//! Batch Monte Carlo experiments for the selection procedure.
//!
//! An experiment repeatedly simulates a known truth, runs the penalized
//! selection over a candidate collection at several sample sizes, and
//! aggregates three empirical diagnostics:
//!
//! * selection frequencies per penalty and sample size (consistency);
//! * the standardized estimation error `sqrt(n / ln ln n) * ||theta_hat -
//!   theta_star||`, whose boundedness across `n` reflects the
//!   iterated-logarithm rate of the estimator;
//! * overfit gaps `(l_hat(m) - l_hat(m_star)) / ln ln n` for candidates that
//!   strictly contain the truth.
//!
//! Everything derives deterministically from the master seed: replication
//! `r` draws its own seed, each sample size reuses a prefix of the
//! replication's longest trajectory, and per-candidate fits are seeded by
//! content, so reports are reproducible and independent of execution order.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::qmle::{fit, lil_statistic, FitOptions, FitResult};
use crate::selection::{fit_collection, model_stream, select_from_fits, PenaltyRule};
use crate::simulate::{derive_seed, simulate, InnovationLaw};
use crate::spec::{ModelSpec, ParamVector};
use crate::stationarity::check_theta_r;
use crate::trend::{median_in_place, trend_over_log_n, TrendSummary};
use crate::Result;

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    /// The data-generating model.
    pub truth_spec: ModelSpec,
    /// True parameter point, supported on `truth_spec`'s active set.
    pub theta_star: ParamVector,
    /// Candidate models; all must share one ambient dimension.
    pub collection: Vec<ModelSpec>,
    /// Penalty rules compared on the same fits.
    pub penalties: Vec<PenaltyRule>,
    /// Strictly increasing sample sizes.
    pub n_grid: Vec<usize>,
    /// Number of replications `R >= 1`.
    pub replications: usize,
    /// Innovation law driving the simulations.
    pub law: InnovationLaw,
    /// Warm-up steps discarded before each kept trajectory.
    pub burn_in: usize,
    /// Master seed; everything else is derived from it.
    pub master_seed: u64,
    /// Optimizer settings shared by every fit.
    pub fit: FitOptions,
}

impl ExperimentConfig {
    /// Checks every structural invariant of the experiment.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidSpec`] for empty grids/collections or a mismatched
    /// true parameter, [`Error::DimensionMismatch`] for ambient-dimension
    /// disagreements, [`Error::Nonstationary`] when the truth lies outside
    /// the stationarity region, plus law/optimizer validation errors.
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidSpec {
                reason: "an experiment needs at least one replication".into(),
            });
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec {
                reason: "sample-size grid must be non-empty and strictly increasing".into(),
            });
        }
        if self.penalties.is_empty() {
            return Err(Error::InvalidSpec { reason: "no penalty rules given".into() });
        }
        if self.collection.is_empty() {
            return Err(Error::InvalidSpec { reason: "candidate collection is empty".into() });
        }
        let d = self.collection[0].ambient_dim();
        if let Some(bad) = self.collection.iter().find(|s| s.ambient_dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.ambient_dim() });
        }
        if self.truth_spec.ambient_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.truth_spec.ambient_dim(),
            });
        }
        if self.theta_star.active() != self.truth_spec.active()
            || self.theta_star.values().len() != d
        {
            return Err(Error::InvalidSpec {
                reason: "true parameter must be supported on the true model's active set".into(),
            });
        }
        self.law.validate()?;
        self.fit.validate()?;
        let check = check_theta_r(&self.truth_spec, &self.theta_star, 1.0)?;
        if !check.in_theta_r {
            return Err(Error::Nonstationary { margin: check.margin });
        }
        Ok(())
    }

    /// Index of the truth inside the collection (family and active set both
    /// equal), when present.
    pub fn truth_index(&self) -> Option<usize> {
        self.collection.iter().position(|s| {
            s.family() == self.truth_spec.family() && s.active() == self.truth_spec.active()
        })
    }

    /// Indices of candidates that strictly contain the truth within the same
    /// family — the models whose selection constitutes overfitting.
    pub fn overfit_indices(&self) -> Vec<usize> {
        self.collection
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                s.family() == self.truth_spec.family() && s.is_strict_superset_of(&self.truth_spec)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// One penalty's result at one `(replication, n)` cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PenaltyOutcome {
    /// Index of the selected candidate in the collection, `None` on failure.
    pub chosen: Option<usize>,
    /// `sqrt(n / ln ln n) * ||theta_hat(chosen) - theta_star||`.
    pub s_n_selected: Option<f64>,
    /// Why selection failed, when it did.
    pub error: Option<Error>,
}

/// Everything one replication produced at one sample size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicationAtN {
    /// The sample size (a prefix length of the replication's trajectory).
    pub n: usize,
    /// Per-penalty selections, aligned with the config's penalty list.
    pub per_penalty: Vec<PenaltyOutcome>,
    /// Standardized error of the true model's own fit.
    pub s_n_true: Option<f64>,
    /// `(l_hat(m) - l_hat(m_star)) / ln ln n`, aligned with
    /// [`ExperimentConfig::overfit_indices`].
    pub overfit_gaps: Vec<Option<f64>>,
}

/// The full record of one replication.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicationOutcome {
    /// Replication index `r` in `0..R`.
    pub rep: usize,
    /// Seed this replication simulated with.
    pub seed: u64,
    /// Set when the whole replication failed (e.g. simulation diverged).
    pub error: Option<Error>,
    /// Per-sample-size results; empty when `error` is set.
    pub at_n: Vec<ReplicationAtN>,
}

/// Aggregated results of an experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    /// Sample sizes, copied from the config.
    pub n_grid: Vec<usize>,
    /// Number of replications aggregated.
    pub replications: usize,
    /// Human-readable labels of the candidates, in collection order.
    pub model_labels: Vec<String>,
    /// Display names of the penalty rules.
    pub penalty_names: Vec<String>,
    /// Label of the data-generating model.
    pub truth_label: String,
    /// Position of the truth in the collection, when it is a candidate.
    pub truth_index: Option<usize>,
    /// `frequencies[p][i][m]` = share of replications in which penalty `p`
    /// selected candidate `m` at `n_grid[i]`; the trailing column counts
    /// failures.  Each row sums to one.
    pub frequencies: Vec<Vec<Vec<f64>>>,
    /// `mstar_rate[p][i]` = empirical probability of selecting the truth
    /// (zero when the truth is not in the collection).
    pub mstar_rate: Vec<Vec<f64>>,
    /// Raw standardized errors of the true model's fit, `[n][replication]`.
    pub s_n_true: Vec<Vec<Option<f64>>>,
    /// Per-`n` median of the available `s_n_true` values.
    pub s_n_true_median: Vec<Option<f64>>,
    /// Per-`n` maximum of the available `s_n_true` values.
    pub s_n_true_max: Vec<Option<f64>>,
    /// Raw standardized errors of each penalty's selected fit,
    /// `[penalty][n][replication]`.
    pub s_n_selected: Vec<Vec<Vec<Option<f64>>>>,
    /// Collection indices of the candidates strictly containing the truth.
    pub overfit_models: Vec<usize>,
    /// Raw overfit gaps, `[overfit_model][n][replication]`.
    pub overfit_gaps: Vec<Vec<Vec<Option<f64>>>>,
    /// Per-`(overfit_model, n)` median of the available gaps.
    pub overfit_gap_median: Vec<Vec<Option<f64>>>,
    /// Replication indices that failed outright.
    pub failed_replications: Vec<usize>,
}

/// Runs one replication: simulate once at the largest `n`, then fit, select
/// and score on each prefix.  Never panics on numerical trouble — failures
/// are recorded in the outcome.
///
/// The caller is expected to have validated `cfg`; structural errors (empty
/// grid, mismatched collection) surface as a whole-replication error.
pub fn run_replication(cfg: &ExperimentConfig, rep: usize) -> ReplicationOutcome {
    let seed = derive_seed(cfg.master_seed, rep as u64);
    match replication_body(cfg, seed) {
        Ok(at_n) => ReplicationOutcome { rep, seed, error: None, at_n },
        Err(e) => ReplicationOutcome { rep, seed, error: Some(e), at_n: Vec::new() },
    }
}

fn replication_body(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<ReplicationAtN>> {
    let &max_n = cfg
        .n_grid
        .last()
        .ok_or(Error::InvalidSpec { reason: "empty sample-size grid".into() })?;
    let x_full = simulate(&cfg.truth_spec, &cfg.theta_star, max_n, cfg.burn_in, cfg.law, seed)?;
    let truth_idx = cfg.truth_index();
    let overfit = cfg.overfit_indices();

    let mut at_n = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let x = x_full.prefix(n)?;
        let run_seed = derive_seed(seed, n as u64);
        let opts = FitOptions { seed: run_seed, ..cfg.fit };
        let fits = fit_collection(&cfg.collection, &x, &opts)?;

        // The truth's own fit: reused from the collection when present
        // (bit-identical by the content-derived seeding), otherwise fitted
        // separately under the same seeding scheme.
        let truth_fit: Option<FitResult> = match truth_idx {
            Some(i) => fits[i].1.as_ref().ok().cloned(),
            None => {
                let t_opts = FitOptions {
                    seed: derive_seed(run_seed, model_stream(&cfg.truth_spec)),
                    ..cfg.fit
                };
                fit(&cfg.truth_spec, &x, &t_opts).ok()
            }
        };
        let s_n_true = truth_fit
            .as_ref()
            .and_then(|f| lil_statistic(&f.theta_hat, &cfg.theta_star, n).ok());
        let overfit_gaps = overfit
            .iter()
            .map(|&i| match (&fits[i].1, &truth_fit) {
                (Ok(over), Some(tr)) => Some((over.l_hat - tr.l_hat) / math::ln_ln(n)),
                _ => None,
            })
            .collect();
        let per_penalty = cfg
            .penalties
            .iter()
            .map(|rule| match select_from_fits(&fits, n, rule) {
                Ok(report) => {
                    let s = lil_statistic(&report.chosen_fit().theta_hat, &cfg.theta_star, n)
                        .ok();
                    PenaltyOutcome { chosen: Some(report.chosen), s_n_selected: s, error: None }
                }
                Err(e) => {
                    PenaltyOutcome { chosen: None, s_n_selected: None, error: Some(e) }
                }
            })
            .collect();
        at_n.push(ReplicationAtN { n, per_penalty, s_n_true, overfit_gaps });
    }
    Ok(at_n)
}

/// Median of the finite entries, `None` when there are none.
fn finite_median(row: &[Option<f64>]) -> Option<f64> {
    let mut vals: Vec<f64> = row.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    if vals.is_empty() {
        None
    } else {
        Some(median_in_place(&mut vals))
    }
}

/// Maximum of the finite entries, `None` when there are none.
fn finite_max(row: &[Option<f64>]) -> Option<f64> {
    row.iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// Deterministically reduces replication outcomes into a report.  The result
/// does not depend on the order of `outcomes` (they are keyed by their
/// replication index).
///
/// # Errors
///
/// Empty or duplicate-replication outcome lists, plus config validation.
pub fn aggregate(cfg: &ExperimentConfig, outcomes: &[ReplicationOutcome]) -> Result<ExperimentReport> {
    if outcomes.is_empty() {
        return Err(Error::InsufficientData {
            reason: "no replication outcomes to aggregate".into(),
        });
    }
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by_key(|&i| outcomes[i].rep);
    if order.windows(2).any(|w| outcomes[w[0]].rep == outcomes[w[1]].rep) {
        return Err(Error::InvalidSpec {
            reason: "duplicate replication index among outcomes".into(),
        });
    }

    let total = outcomes.len();
    let n_count = cfg.n_grid.len();
    let p_count = cfg.penalties.len();
    let m_count = cfg.collection.len();
    let truth_index = cfg.truth_index();
    let overfit_models = cfg.overfit_indices();

    let mut counts = vec![vec![vec![0_usize; m_count + 1]; n_count]; p_count];
    let mut s_n_true = vec![vec![None; total]; n_count];
    let mut s_n_selected = vec![vec![vec![None; total]; n_count]; p_count];
    let mut overfit_gaps = vec![vec![vec![None; total]; n_count]; overfit_models.len()];
    let mut failed_replications = Vec::new();

    for (col, &oi) in order.iter().enumerate() {
        let outcome = &outcomes[oi];
        if outcome.error.is_some() {
            failed_replications.push(outcome.rep);
            for per_n in &mut counts {
                for row in per_n.iter_mut() {
                    row[m_count] += 1;
                }
            }
            continue;
        }
        for (ni, &n) in cfg.n_grid.iter().enumerate() {
            let Some(at) = outcome.at_n.iter().find(|a| a.n == n) else {
                for per_n in &mut counts {
                    per_n[ni][m_count] += 1;
                }
                continue;
            };
            s_n_true[ni][col] = at.s_n_true;
            for (k, gap) in at.overfit_gaps.iter().enumerate().take(overfit_models.len()) {
                overfit_gaps[k][ni][col] = *gap;
            }
            for p in 0..p_count {
                match at.per_penalty.get(p) {
                    Some(po) => {
                        s_n_selected[p][ni][col] = po.s_n_selected;
                        match po.chosen {
                            Some(m) if m < m_count => counts[p][ni][m] += 1,
                            _ => counts[p][ni][m_count] += 1,
                        }
                    }
                    None => counts[p][ni][m_count] += 1,
                }
            }
        }
    }

    let frequencies: Vec<Vec<Vec<f64>>> = counts
        .iter()
        .map(|per_n| {
            per_n
                .iter()
                .map(|row| row.iter().map(|&c| c as f64 / total as f64).collect())
                .collect()
        })
        .collect();
    let mstar_rate: Vec<Vec<f64>> = frequencies
        .iter()
        .map(|per_n| per_n.iter().map(|row| truth_index.map_or(0.0, |t| row[t])).collect())
        .collect();
    let s_n_true_median = s_n_true.iter().map(|row| finite_median(row)).collect();
    let s_n_true_max = s_n_true.iter().map(|row| finite_max(row)).collect();
    let overfit_gap_median = overfit_gaps
        .iter()
        .map(|per_n| per_n.iter().map(|row| finite_median(row)).collect())
        .collect();

    Ok(ExperimentReport {
        n_grid: cfg.n_grid.clone(),
        replications: total,
        model_labels: cfg.collection.iter().map(|s| s.label()).collect(),
        penalty_names: cfg.penalties.iter().map(|p| p.name()).collect(),
        truth_label: cfg.truth_spec.label(),
        truth_index,
        frequencies,
        mstar_rate,
        s_n_true,
        s_n_true_median,
        s_n_true_max,
        s_n_selected,
        overfit_models,
        overfit_gaps,
        overfit_gap_median,
        failed_replications,
    })
}

/// Validates the config, runs all replications sequentially and aggregates.
/// (Replications are independent; callers needing parallelism can scatter
/// [`run_replication`] themselves and reduce with [`aggregate`].)
///
/// # Errors
///
/// Config validation; individual replication failures never abort the batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<ReplicationOutcome> =
        (0..cfg.replications).map(|r| run_replication(cfg, r)).collect();
    aggregate(cfg, &outcomes)
}

/// Boundedness analysis of a standardized-error statistic across `n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LilSummary {
    /// Sample sizes the statistic was observed at.
    pub n_grid: Vec<usize>,
    /// Raw per-replication values, `[n][replication]`.
    pub s_n: Vec<Vec<Option<f64>>>,
    /// Trend of the statistic against `ln n`; `trend.verdict` is `Bounded`
    /// when the growth rate is statistically compatible with zero.
    pub trend: TrendSummary,
}

fn summarize(n_grid: &[usize], s_n: &[Vec<Option<f64>>]) -> Result<LilSummary> {
    let samples: Vec<Vec<f64>> = s_n
        .iter()
        .map(|row| row.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
        .collect();
    let trend = trend_over_log_n(n_grid, &samples)?;
    Ok(LilSummary { n_grid: n_grid.to_vec(), s_n: s_n.to_vec(), trend })
}

/// Boundedness verdict for the true model's standardized error — the
/// empirical counterpart of the iterated-logarithm rate of the estimator.
///
/// # Errors
///
/// [`Error::InsufficientData`] unless values exist at three or more sample
/// sizes.
pub fn lil_summary(report: &ExperimentReport) -> Result<LilSummary> {
    summarize(&report.n_grid, &report.s_n_true)
}

/// Same analysis applied to a penalty's *selected* model.  When the penalty
/// is consistent this inherits boundedness from the true model's rate.
///
/// # Errors
///
/// Unknown penalty index, or as [`lil_summary`].
pub fn lil_summary_selected(report: &ExperimentReport, penalty: usize) -> Result<LilSummary> {
    let per_n = report.s_n_selected.get(penalty).ok_or(Error::InvalidSpec {
        reason: "penalty index out of range for this report".into(),
    })?;
    summarize(&report.n_grid, per_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::{build_collection, CollectionMode, FamilyGrid};
    use crate::family::ModelFamily;
    use crate::selection::SelectionReport;
    use crate::trend::Verdict;

    fn light_fit(seed: u64) -> FitOptions {
        FitOptions {
            tol_x: 1e-6,
            tol_f: 1e-8,
            max_evals_per_dim: 400,
            random_starts: 1,
            seed,
        }
    }

    fn ar_chain(max_p: usize) -> Vec<ModelSpec> {
        let grid = FamilyGrid::Ar { max_p };
        build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
            .unwrap()
    }

    /// Truth AR(1) with coefficient `phi`, expressed in the `AR(max_p)`
    /// ambient so it coincides with a collection member.
    fn ar1_truth(max_p: usize, phi: f64) -> (ModelSpec, ParamVector) {
        let family = ModelFamily::Ar { p: max_p };
        let spec = ModelSpec::new(family, vec![0, max_p], family.default_box()).unwrap();
        let theta = ParamVector::embed(&spec, &[phi, 1.0]).unwrap();
        (spec, theta)
    }

    fn base_config() -> ExperimentConfig {
        let (truth_spec, theta_star) = ar1_truth(1, 0.5);
        ExperimentConfig {
            truth_spec,
            theta_star,
            collection: ar_chain(1),
            penalties: vec![PenaltyRule::Bic],
            n_grid: vec![500],
            replications: 1,
            law: InnovationLaw::Gaussian,
            burn_in: 200,
            master_seed: 77,
            fit: light_fit(0),
        }
    }

    fn standalone_selection(cfg: &ExperimentConfig, rep: usize, n: usize) -> SelectionReport {
        let rep_seed = derive_seed(cfg.master_seed, rep as u64);
        let x = simulate(
            &cfg.truth_spec,
            &cfg.theta_star,
            *cfg.n_grid.last().unwrap(),
            cfg.burn_in,
            cfg.law,
            rep_seed,
        )
        .unwrap()
        .prefix(n)
        .unwrap();
        let opts = FitOptions { seed: derive_seed(rep_seed, n as u64), ..cfg.fit };
        let fits = fit_collection(&cfg.collection, &x, &opts).unwrap();
        select_from_fits(&fits, n, &cfg.penalties[0]).unwrap()
    }

    #[test]
    fn degenerate_single_replication_batch_matches_standalone_selection() {
        let cfg = base_config();
        let report = run_experiment(&cfg).unwrap();
        let standalone = standalone_selection(&cfg, 0, 500);

        // The one replication's selection is the whole frequency table.
        assert_eq!(report.frequencies[0][0][standalone.chosen], 1.0);
        let row_sum: f64 = report.frequencies[0][0].iter().sum();
        assert!((row_sum - 1.0).abs() < 1e-12);

        // And the recorded standardized error comes from the same fit.
        let expected = lil_statistic(
            &standalone.chosen_fit().theta_hat,
            &cfg.theta_star,
            500,
        )
        .unwrap();
        assert_eq!(report.s_n_selected[0][0][0], Some(expected));
    }

    #[test]
    fn truth_fit_is_reused_from_the_collection() {
        let cfg = base_config();
        let outcome = run_replication(&cfg, 0);
        assert!(outcome.error.is_none());
        let standalone = standalone_selection(&cfg, 0, 500);
        let truth_idx = cfg.truth_index().unwrap();
        let fit_of_truth = standalone.entries[truth_idx].fit.as_ref().unwrap();
        let expected = lil_statistic(&fit_of_truth.theta_hat, &cfg.theta_star, 500).unwrap();
        assert_eq!(outcome.at_n[0].s_n_true, Some(expected));
    }

    #[test]
    fn sample_sizes_reuse_prefixes_of_one_trajectory() {
        let mut cfg = base_config();
        cfg.n_grid = vec![300, 600];
        let outcome = run_replication(&cfg, 0);
        assert!(outcome.error.is_none());
        assert_eq!(outcome.at_n.len(), 2);

        // Reproduce the n = 300 cell from the length-600 simulation.
        let rep_seed = derive_seed(cfg.master_seed, 0);
        let x600 =
            simulate(&cfg.truth_spec, &cfg.theta_star, 600, cfg.burn_in, cfg.law, rep_seed)
                .unwrap();
        let x300 = x600.prefix(300).unwrap();
        let opts = FitOptions { seed: derive_seed(rep_seed, 300), ..cfg.fit };
        let fits = fit_collection(&cfg.collection, &x300, &opts).unwrap();
        let report = select_from_fits(&fits, 300, &cfg.penalties[0]).unwrap();
        assert_eq!(outcome.at_n[0].per_penalty[0].chosen, Some(report.chosen));
        assert_eq!(
            outcome.at_n[0].per_penalty[0].s_n_selected,
            lil_statistic(&report.chosen_fit().theta_hat, &cfg.theta_star, 300).ok()
        );
    }

    #[test]
    fn aggregation_is_invariant_to_replication_order() {
        let mut cfg = base_config();
        cfg.replications = 4;
        cfg.n_grid = vec![200, 400];
        let outcomes: Vec<_> = (0..4).map(|r| run_replication(&cfg, r)).collect();
        let forward = aggregate(&cfg, &outcomes).unwrap();
        let mut shuffled = outcomes.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        assert_eq!(forward, aggregate(&cfg, &shuffled).unwrap());
    }

    #[test]
    fn whole_replication_failures_land_in_the_failed_column() {
        let cfg = base_config();
        let good = run_replication(&cfg, 0);
        let failed = ReplicationOutcome {
            rep: 1,
            seed: 0,
            error: Some(Error::SimulationDiverged { step: 3 }),
            at_n: Vec::new(),
        };
        let report = aggregate(&cfg, &[good, failed]).unwrap();
        assert_eq!(report.failed_replications, vec![1]);
        assert_eq!(report.frequencies[0][0][cfg.collection.len()], 0.5);
        let row_sum: f64 = report.frequencies[0][0].iter().sum();
        assert!((row_sum - 1.0).abs() < 1e-12);
        assert_eq!(report.s_n_true[0][1], None);
    }

    #[test]
    fn nonstationary_truth_is_rejected_by_validate_but_recorded_by_replications() {
        let (spec, _) = ar1_truth(1, 0.5);
        let explosive = ParamVector::embed(&spec, &[1.5, 1.0]).unwrap();
        let mut cfg = base_config();
        cfg.theta_star = explosive;
        assert!(matches!(cfg.validate(), Err(Error::Nonstationary { .. })));
        let outcome = run_replication(&cfg, 0);
        assert!(matches!(outcome.error, Some(Error::Nonstationary { .. })));
        assert!(outcome.at_n.is_empty());
    }

    #[test]
    fn aic_overfits_strictly_more_often_than_bic() {
        // White-noise truth against {white noise, AR(1)}: the likelihood-ratio
        // gain of the spurious coefficient exceeds AIC's fixed toll with
        // noticeable probability, but almost never BIC's ln(n).
        let family = ModelFamily::Ar { p: 1 };
        let truth_spec = ModelSpec::new(family, vec![1], family.default_box()).unwrap();
        let theta_star = ParamVector::embed(&truth_spec, &[1.0]).unwrap();
        let cfg = ExperimentConfig {
            truth_spec,
            theta_star,
            collection: ar_chain(1),
            penalties: vec![PenaltyRule::Aic, PenaltyRule::Bic],
            n_grid: vec![5000],
            replications: 500,
            law: InnovationLaw::Gaussian,
            burn_in: 500,
            master_seed: 20_250_801,
            fit: light_fit(0),
        };
        let report = run_experiment(&cfg).unwrap();
        let overfit_idx = cfg.overfit_indices();
        assert_eq!(overfit_idx, vec![1]);
        let aic_over = report.frequencies[0][0][1];
        let bic_over = report.frequencies[1][0][1];
        assert!(
            aic_over > bic_over,
            "AIC should overfit strictly more often (AIC {aic_over}, BIC {bic_over})"
        );
        // Classical large-sample rates: ~16% for AIC, well under 5% for BIC.
        assert!(aic_over > 0.08, "AIC overfit rate suspiciously low: {aic_over}");
        assert!(bic_over < 0.05, "BIC overfit rate suspiciously high: {bic_over}");
        assert_eq!(report.failed_replications.len(), 0);
    }

    #[test]
    fn lil_summary_flags_injected_trends() {
        let mut cfg = base_config();
        cfg.n_grid = vec![20, 40, 80];
        cfg.replications = 2;
        let mut report = run_experiment(&cfg).unwrap();

        let inject = |shape: &dyn Fn(f64) -> f64| -> Vec<Vec<Option<f64>>> {
            cfg.n_grid
                .iter()
                .map(|&n| {
                    (0..2)
                        .map(|r| Some(shape(math::ln(n as f64)) + 1e-3 * r as f64))
                        .collect()
                })
                .collect()
        };

        report.s_n_true = inject(&|ln_n| 2.0 * ln_n);
        let summary = lil_summary(&report).unwrap();
        assert_eq!(summary.trend.verdict, Verdict::Unbounded);

        report.s_n_true = inject(&|_| 1.4);
        let summary = lil_summary(&report).unwrap();
        assert_eq!(summary.trend.verdict, Verdict::Bounded);
        assert_eq!(summary.s_n, report.s_n_true);

        // Starve all but one sample size: no longer enough to judge a trend.
        report.s_n_true[0] = vec![None, None];
        report.s_n_true[1] = vec![None, None];
        assert!(matches!(lil_summary(&report), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn validate_rejects_structural_mistakes() {
        let good = base_config();
        assert!(good.validate().is_ok());

        let mut cfg = good.clone();
        cfg.replications = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = good.clone();
        cfg.n_grid = vec![500, 500];
        assert!(cfg.validate().is_err());

        let mut cfg = good.clone();
        cfg.penalties.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = good.clone();
        cfg.collection = ar_chain(2); // ambient d = 3 vs truth's 2
        assert!(matches!(cfg.validate(), Err(Error::DimensionMismatch { .. })));

        // theta_star supported on a different active set than the truth spec.
        let mut cfg = good.clone();
        let full = ModelSpec::full(ModelFamily::Ar { p: 1 }).unwrap();
        cfg.truth_spec = ModelSpec::new(
            ModelFamily::Ar { p: 1 },
            vec![1],
            ModelFamily::Ar { p: 1 }.default_box(),
        )
        .unwrap();
        cfg.theta_star = ParamVector::new(&full, vec![0.5, 1.0]).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidSpec { .. })));

        let mut cfg = good;
        cfg.law = InnovationLaw::StudentT { nu: 3.0 };
        assert!(matches!(cfg.validate(), Err(Error::MomentUndefined { .. })));
    }
}
