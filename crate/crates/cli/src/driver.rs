//! Monte Carlo orchestration.
//!
//! The experiment's replications are independent, and aggregation is
//! order-invariant, so the driver fans them out over scoped worker threads
//! with a shared atomic counter (work stealing keeps cores busy even when
//! replication costs vary).  Results are identical to the sequential path
//! bit for bit; `ACSEL_THREADS=1` forces that path.

use std::sync::atomic::{AtomicUsize, Ordering};

use acsel_core::{
    aggregate, run_experiment, run_replication, ExperimentConfig, ExperimentReport,
    ReplicationOutcome,
};

use crate::error::{CliError, Result};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "ACSEL_THREADS";

fn parse_thread_override(raw: &str) -> Result<usize> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))),
    }
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => parse_thread_override(&raw),
        Err(_) => Ok(std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)),
    }
}

/// Runs the full experiment, parallelizing replications across threads.
///
/// The thread count comes from [`THREADS_ENV`] when set, otherwise from the
/// machine's available parallelism.
///
/// # Errors
///
/// Structural problems in `cfg` (validation), a bad thread-count override,
/// or aggregation failures.  Per-replication numerical trouble is recorded
/// in the report, never returned.
pub fn run_mc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_mc_with_threads(cfg, thread_count()?)
}

/// [`run_mc`] with an explicit worker count.
pub fn run_mc_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    cfg.validate().map_err(CliError::from_run)?;
    let threads = threads.min(cfg.replications);
    if threads <= 1 {
        return run_experiment(cfg).map_err(CliError::from_run);
    }

    let next = AtomicUsize::new(0);
    let total = cfg.replications;
    let mut outcomes: Vec<ReplicationOutcome> = Vec::with_capacity(total);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(threads);
        for _ in 0..threads {
            let next = &next;
            handles.push(scope.spawn(move || {
                let mut local = Vec::new();
                loop {
                    let rep = next.fetch_add(1, Ordering::Relaxed);
                    if rep >= total {
                        break;
                    }
                    local.push(run_replication(cfg, rep));
                }
                local
            }));
        }
        for handle in handles {
            let local = handle.join().expect("replication workers do not panic");
            outcomes.extend(local);
        }
    });

    aggregate(cfg, &outcomes).map_err(CliError::from_run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use acsel_core::{
        build_collection, CollectionMode, FamilyGrid, FitOptions, InnovationLaw, ModelFamily,
        ModelSpec, ParamVector, PenaltyRule,
    };

    fn small_config(replications: usize) -> ExperimentConfig {
        let family = ModelFamily::Ar { p: 1 };
        let spec = ModelSpec::new(family, vec![0, 1], family.default_box()).unwrap();
        let theta = ParamVector::new(&spec, vec![0.4, 1.0]).unwrap();
        let collection = build_collection(
            FamilyGrid::Ar { max_p: 1 },
            CollectionMode::Hierarchical,
            &family.default_box(),
        )
        .unwrap();
        ExperimentConfig {
            truth_spec: spec,
            theta_star: theta,
            collection,
            penalties: vec![PenaltyRule::Bic],
            n_grid: vec![60, 90],
            replications,
            law: InnovationLaw::Gaussian,
            burn_in: 50,
            master_seed: 11,
            fit: FitOptions { max_evals_per_dim: 300, random_starts: 1, ..FitOptions::default() },
        }
    }

    #[test]
    fn parallel_run_matches_the_sequential_report() {
        let cfg = small_config(6);
        let sequential = run_experiment(&cfg).unwrap();
        let parallel = run_mc_with_threads(&cfg, 3).unwrap();
        assert_eq!(parallel, sequential);
    }

    #[test]
    fn worker_count_is_capped_by_the_replication_count() {
        let cfg = small_config(2);
        let few = run_mc_with_threads(&cfg, 64).unwrap();
        let one = run_mc_with_threads(&cfg, 1).unwrap();
        assert_eq!(few, one);
    }

    #[test]
    fn bad_thread_overrides_are_config_errors() {
        for bad in ["0", "-2", "many", ""] {
            let err = parse_thread_override(bad).unwrap_err();
            assert_eq!(err.code(), 2, "override `{bad}` should be rejected");
            assert!(err.to_string().contains(THREADS_ENV));
        }
        assert_eq!(parse_thread_override(" 4 ").unwrap(), 4);
    }
}
