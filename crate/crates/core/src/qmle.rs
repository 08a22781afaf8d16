//! Quasi-maximum-likelihood estimation by projected multi-start search.
//!
//! The estimator is the maximizer of the quasi-log-likelihood over the box
//! of a model's active coordinates.  No gradient is available in closed
//! form across all five families, so the search is a Nelder-Mead simplex
//! restricted to the active coordinates with every proposal clamped into
//! the box.  Local maxima (a documented hazard for GARCH likelihoods) are
//! mitigated by one deterministic start plus seeded random interior starts;
//! the best final point over all starts wins, ties broken by start order.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::family::ModelFamily;
use crate::likelihood::lhat_n;
use crate::math;
use crate::simulate::Trajectory;
use crate::spec::{ModelSpec, ParamVector};
use crate::Result;

/// Settings for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FitOptions {
    /// Simplex-diameter convergence threshold (per coordinate).
    pub tol_x: f64,
    /// Objective-spread convergence threshold.
    pub tol_f: f64,
    /// Evaluation budget per start, multiplied by the model dimension.
    pub max_evals_per_dim: usize,
    /// Number of seeded random interior starts beyond the deterministic one.
    pub random_starts: usize,
    /// Seed for the random starts; same seed, same fit, bit for bit.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol_x: 1e-8,
            tol_f: 1e-10,
            max_evals_per_dim: 2000,
            random_starts: 4,
            seed: 0,
        }
    }
}

impl FitOptions {
    /// Checks that tolerances are positive and the budget is nonzero.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidSpec`] describing the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_x > 0.0) || !(self.tol_f > 0.0) {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "tolerances must be positive, got tol_x = {}, tol_f = {}",
                    self.tol_x, self.tol_f
                ),
            });
        }
        if self.max_evals_per_dim == 0 {
            return Err(Error::InvalidSpec {
                reason: "max_evals_per_dim must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Outcome of a quasi-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    /// The estimate: inside the box, zeros off the active set.
    pub theta_hat: ParamVector,
    /// `lhat_n(theta_hat)`, recomputed once at the end.
    pub l_hat: f64,
    /// Total objective evaluations across all starts (including the final
    /// recomputation).
    pub n_evals: usize,
    /// Whether some start met both tolerance criteria and the estimate is
    /// not pinned to the box boundary.
    pub converged: bool,
    /// Whether any active coordinate of the estimate sits exactly on a box
    /// bound (degenerate single-point coordinates excluded).
    pub boundary: bool,
    /// Number of starts attempted.
    pub starts_used: usize,
}

/// The square root of `n / ln ln n` times the distance between an estimate
/// and a reference parameter: under the correct model this standardized
/// error stays bounded as `n` grows (law of the iterated logarithm), making
/// it the statistic the Monte Carlo module tracks across `n`.
///
/// # Errors
///
/// [`Error::InsufficientData`] for `n < 16` (the iterated logarithm must be
/// positive) and [`Error::DimensionMismatch`] for incompatible parameters.
pub fn lil_statistic(theta_hat: &ParamVector, theta_star: &ParamVector, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::InsufficientData {
            reason: format!("standardized-error scaling needs n >= 16, got {n}"),
        });
    }
    if theta_hat.values().len() != theta_star.values().len() {
        return Err(Error::DimensionMismatch {
            expected: theta_star.values().len(),
            got: theta_hat.values().len(),
        });
    }
    Ok(math::sqrt(n as f64 / math::ln_ln(n)) * theta_hat.distance(theta_star))
}

/// Maximizes the quasi-log-likelihood of `spec` on `x`.
///
/// Runs `1 + opts.random_starts` Nelder-Mead searches over the active
/// coordinates (proposals clamped into the box) and returns the best final
/// point.  The deterministic start is the box center, except for the
/// conditionally heteroskedastic families where the intercept is
/// variance-targeted: `omega_0 = 0.5 * var(x) * (1 - a_0 - b_0)` with total
/// shock/persistence shares `(a_0, b_0) = (0.1, 0.8)` split over the active
/// coefficients.  Same inputs and options, same result, bit for bit.
///
/// # Errors
///
/// [`Error::SeriesTooShort`] when `n < |m| + 1`,
/// [`Error::OptimizationFailed`] when no start ever produced a finite
/// objective value, plus option/spec validation errors.
pub fn fit(spec: &ModelSpec, x: &Trajectory, opts: &FitOptions) -> Result<FitResult> {
    opts.validate()?;
    let k = spec.model_dim();
    if x.len() < k + 1 {
        return Err(Error::SeriesTooShort { n: x.len(), min: k + 1 });
    }

    let lower: Vec<f64> = spec.active().iter().map(|&i| spec.bounds().lower(i)).collect();
    let upper: Vec<f64> = spec.active().iter().map(|&i| spec.bounds().upper(i)).collect();
    let budget = opts.max_evals_per_dim.saturating_mul(k);

    let mut objective = Objective { spec, x, evals: 0 };
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    let starts_used = 1 + opts.random_starts;

    let mut best: Option<SearchOutcome> = None;
    let mut any_converged = false;
    for s in 0..starts_used {
        let start = if s == 0 {
            deterministic_start(spec, x, &lower, &upper)
        } else {
            (0..k)
                .map(|j| {
                    let u: f64 = rng.gen();
                    lower[j] + u * (upper[j] - lower[j])
                })
                .collect()
        };
        let outcome = nelder_mead(&mut objective, start, &lower, &upper, budget, opts);
        any_converged |= outcome.converged;
        let better = match &best {
            None => true,
            Some(b) => outcome.value < b.value,
        };
        if better {
            best = Some(outcome);
        }
    }

    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::OptimizationFailed);
    }

    let theta_hat = ParamVector::embed(spec, &best.point)?;
    let boundary = spec.active().iter().enumerate().any(|(j, _)| {
        lower[j] < upper[j]
            && (best.point[j] == lower[j] || best.point[j] == upper[j])
    });
    let l_hat = lhat_n(spec, &theta_hat, x)?.l_hat;
    objective.evals += 1;
    Ok(FitResult {
        theta_hat,
        l_hat,
        n_evals: objective.evals,
        converged: any_converged && !boundary,
        boundary,
        starts_used,
    })
}

/// Deterministic first start: box center, with variance targeting for the
/// families whose intercept feeds a variance recursion.
fn deterministic_start(spec: &ModelSpec, x: &Trajectory, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    let mut start: Vec<f64> =
        lower.iter().zip(upper).map(|(&lo, &hi)| 0.5 * (lo + hi)).collect();

    let (omega_idx, shock_range, persist_range) = match spec.family() {
        ModelFamily::Arch { q } => (0, 1..q + 1, 0..0),
        ModelFamily::Garch { p, q } => (0, 1..q + 1, q + 1..q + 1 + p),
        ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
            let w = p + q;
            (w, w + 1..w + 1 + big_q, w + 1 + big_q..w + 1 + big_q + big_p)
        }
        _ => return start,
    };

    let n = x.len() as f64;
    let mean: f64 = x.values().iter().sum::<f64>() / n;
    let var: f64 = x.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;

    let active = spec.active();
    let shocks: Vec<usize> =
        (0..active.len()).filter(|&j| shock_range.contains(&active[j])).collect();
    let persists: Vec<usize> =
        (0..active.len()).filter(|&j| persist_range.contains(&active[j])).collect();
    let a_total = if shocks.is_empty() { 0.0 } else { 0.1 };
    let b_total = if persists.is_empty() { 0.0 } else { 0.8 };
    for &j in &shocks {
        start[j] = a_total / shocks.len() as f64;
    }
    for &j in &persists {
        start[j] = b_total / persists.len() as f64;
    }
    if let Some(j) = (0..active.len()).find(|&j| active[j] == omega_idx) {
        start[j] = 0.5 * var.max(0.0) * (1.0 - a_total - b_total);
    }
    // Mean coordinates of ARMA-GARCH start at zero rather than mid-box.
    if let ModelFamily::ArmaGarch { p, q, .. } = spec.family() {
        for j in 0..active.len() {
            if active[j] < p + q {
                start[j] = 0.0;
            }
        }
    }
    for j in 0..start.len() {
        start[j] = start[j].clamp(lower[j], upper[j]);
    }
    start
}

struct Objective<'a> {
    spec: &'a ModelSpec,
    x: &'a Trajectory,
    evals: usize,
}

impl Objective<'_> {
    /// Negated quasi-log-likelihood; non-finite values map to `+inf` so the
    /// simplex simply retreats from them.
    fn eval(&mut self, reduced: &[f64]) -> f64 {
        self.evals += 1;
        match ParamVector::embed(self.spec, reduced) {
            Ok(theta) => match lhat_n(self.spec, &theta, self.x) {
                Ok(v) if v.l_hat.is_finite() => -v.l_hat,
                _ => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }
    }
}

struct SearchOutcome {
    point: Vec<f64>,
    value: f64,
    converged: bool,
}

fn clamp_into(point: &mut [f64], lower: &[f64], upper: &[f64]) {
    for j in 0..point.len() {
        point[j] = point[j].clamp(lower[j], upper[j]);
    }
}

/// Nelder-Mead over the coordinates with positive box width, minimizing
/// `objective` with every proposal clamped into the box.  Standard
/// coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
fn nelder_mead(
    objective: &mut Objective<'_>,
    mut start: Vec<f64>,
    lower: &[f64],
    upper: &[f64],
    budget: usize,
    opts: &FitOptions,
) -> SearchOutcome {
    clamp_into(&mut start, lower, upper);
    let free: Vec<usize> = (0..start.len()).filter(|&j| lower[j] < upper[j]).collect();
    if free.is_empty() {
        let value = objective.eval(&start);
        return SearchOutcome { point: start, value, converged: true };
    }

    // Initial simplex: the start plus one vertex per free coordinate,
    // stepped by 5% of the box width (stepping away from the nearer bound).
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(free.len() + 1);
    let v0 = objective.eval(&start);
    simplex.push((start.clone(), v0));
    for &j in &free {
        let mut v = start.clone();
        let step = 0.05 * (upper[j] - lower[j]);
        v[j] = if v[j] + step <= upper[j] { v[j] + step } else { v[j] - step };
        let val = objective.eval(&v);
        simplex.push((v, val));
    }

    let mut converged = false;
    while objective.evals < budget {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("values never NaN"));

        let diameter = free
            .iter()
            .map(|&j| {
                simplex[1..]
                    .iter()
                    .map(|(v, _)| (v[j] - simplex[0].0[j]).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        let spread = simplex[free.len()].1 - simplex[0].1;
        if diameter < opts.tol_x && spread < opts.tol_f {
            converged = true;
            break;
        }

        let worst = free.len();
        let mut centroid = alloc::vec![0.0; start.len()];
        for (v, _) in &simplex[..worst] {
            for &j in &free {
                centroid[j] += v[j];
            }
        }
        for &j in &free {
            centroid[j] /= worst as f64;
        }
        for j in 0..start.len() {
            if lower[j] == upper[j] {
                centroid[j] = simplex[0].0[j];
            }
        }

        let shifted = |scale: f64| -> Vec<f64> {
            let mut v = centroid.clone();
            for &j in &free {
                v[j] += scale * (centroid[j] - simplex[worst].0[j]);
            }
            clamp_into(&mut v, lower, upper);
            v
        };

        let reflected = shifted(1.0);
        let fr = objective.eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = shifted(2.0);
            let fe = objective.eval(&expanded);
            simplex[worst] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[worst - 1].1 {
            simplex[worst] = (reflected, fr);
        } else {
            // Outside contraction when the reflection at least beat the
            // worst vertex, inside contraction otherwise.
            let outside = fr < simplex[worst].1;
            let contracted = if outside { shifted(0.5) } else { shifted(-0.5) };
            let fc = objective.eval(&contracted);
            let accept = if outside { fc <= fr } else { fc < simplex[worst].1 };
            if accept {
                simplex[worst] = (contracted, fc);
            } else {
                // Shrink every non-best vertex halfway toward the best.
                for i in 1..=worst {
                    let mut v = simplex[i].0.clone();
                    for &j in &free {
                        v[j] = simplex[0].0[j] + 0.5 * (v[j] - simplex[0].0[j]);
                    }
                    clamp_into(&mut v, lower, upper);
                    let val = objective.eval(&v);
                    simplex[i] = (v, val);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("values never NaN"));
    let (point, value) = simplex.swap_remove(0);
    SearchOutcome { point, value, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::ModelFamily;
    use crate::simulate::{simulate, InnovationLaw};
    use crate::spec::ParamBox;
    use alloc::vec;

    fn full(family: ModelFamily) -> ModelSpec {
        ModelSpec::full(family).unwrap()
    }

    #[test]
    fn constant_variance_recovers_the_mean_square() {
        let spec = full(ModelFamily::Ar { p: 0 });
        let r2 = 2.0_f64.sqrt();
        let x = Trajectory::new(vec![r2, -r2, r2, -r2]).unwrap();
        let fit = fit(&spec, &x, &FitOptions::default()).unwrap();
        assert!((fit.theta_hat.get(0) - 2.0).abs() < 1e-6 * 2.0);
        assert!(fit.converged);
        assert!(!fit.boundary);
    }

    #[test]
    fn ar1_estimate_matches_conditional_least_squares() {
        let spec = full(ModelFamily::Ar { p: 1 });
        let truth = ParamVector::new(&spec, vec![0.5, 1.0]).unwrap();
        let x = simulate(&spec, &truth, 10_000, 1000, InnovationLaw::Gaussian, 99).unwrap();
        let v = x.values();
        let (mut num, mut den) = (0.0, 0.0);
        for t in 1..v.len() {
            num += v[t] * v[t - 1];
            den += v[t - 1] * v[t - 1];
        }
        let ols = num / den;
        let fit = fit(&spec, &x, &FitOptions::default()).unwrap();
        assert!(
            (fit.theta_hat.get(0) - ols).abs() < 1e-3,
            "phi_hat = {}, OLS = {ols}",
            fit.theta_hat.get(0)
        );
        assert!(fit.converged);
    }

    #[test]
    fn refitting_is_bit_reproducible() {
        let spec = full(ModelFamily::Garch { p: 1, q: 1 });
        let truth = ParamVector::new(&spec, vec![0.1, 0.2, 0.5]).unwrap();
        let x = simulate(&spec, &truth, 2000, 1000, InnovationLaw::Gaussian, 17).unwrap();
        let opts = FitOptions { max_evals_per_dim: 400, ..FitOptions::default() };
        let a = fit(&spec, &x, &opts).unwrap();
        let b = fit(&spec, &x, &opts).unwrap();
        assert_eq!(a.theta_hat, b.theta_hat);
        assert_eq!(a.n_evals, b.n_evals);
        assert_eq!(a.l_hat.to_bits(), b.l_hat.to_bits());
    }

    #[test]
    fn fitted_value_is_never_below_the_deterministic_start() {
        let spec = full(ModelFamily::Ar { p: 1 });
        let truth = ParamVector::new(&spec, vec![0.7, 2.0]).unwrap();
        let x = simulate(&spec, &truth, 500, 500, InnovationLaw::Gaussian, 3).unwrap();
        let center = ParamVector::new(&spec, vec![0.0, 0.5 * (1e-8 + 1e4)]).unwrap();
        let at_center = crate::likelihood::lhat_n(&spec, &center, &x).unwrap().l_hat;
        let fit = fit(&spec, &x, &FitOptions::default()).unwrap();
        assert!(fit.l_hat >= at_center);
    }

    #[test]
    fn scaling_the_data_scales_the_variance_estimate() {
        let spec = full(ModelFamily::Ar { p: 0 });
        let base = vec![0.6, -1.1, 0.4, 2.2, -0.8, 1.3, 0.2, -1.7];
        let x1 = Trajectory::new(base.clone()).unwrap();
        let x10 = Trajectory::new(base.iter().map(|v| 10.0 * v).collect()).unwrap();
        let s1 = fit(&spec, &x1, &FitOptions::default()).unwrap().theta_hat.get(0);
        let s100 = fit(&spec, &x10, &FitOptions::default()).unwrap().theta_hat.get(0);
        // The search box is not rescaled with the data, so the two runs take
        // different simplex paths; agreement holds to optimizer tolerance.
        assert!(
            (s100 / s1 - 100.0).abs() < 1e-6 * 100.0,
            "ratio = {}",
            s100 / s1
        );
    }

    #[test]
    fn too_short_series_is_rejected() {
        let spec = full(ModelFamily::Ar { p: 1 });
        let x = Trajectory::new(vec![1.0, -1.0]).unwrap();
        assert!(matches!(
            fit(&spec, &x, &FitOptions::default()),
            Err(Error::SeriesTooShort { n: 2, min: 3 })
        ));
    }

    #[test]
    fn hopeless_data_reports_optimization_failure() {
        // Residuals overflow to infinity at every parameter value.
        let spec = full(ModelFamily::Ar { p: 1 });
        let x = Trajectory::new(vec![1e160, -1e160, 1e160, -1e160]).unwrap();
        assert!(matches!(
            fit(&spec, &x, &FitOptions::default()),
            Err(Error::OptimizationFailed)
        ));
    }

    #[test]
    fn estimates_pinned_to_the_box_raise_the_boundary_flag() {
        // Data from phi = 0.8 fitted with the box clipped at 0.5.
        let wide = full(ModelFamily::Ar { p: 1 });
        let truth = ParamVector::new(&wide, vec![0.8, 1.0]).unwrap();
        let x = simulate(&wide, &truth, 3000, 500, InnovationLaw::Gaussian, 55).unwrap();
        let narrow = ModelSpec::new(
            ModelFamily::Ar { p: 1 },
            vec![0, 1],
            ParamBox::new(vec![-0.5, 1e-8], vec![0.5, 1e4]).unwrap(),
        )
        .unwrap();
        let fit = fit(&narrow, &x, &FitOptions::default()).unwrap();
        assert_eq!(fit.theta_hat.get(0), 0.5);
        assert!(fit.boundary);
        assert!(!fit.converged);
    }

    #[test]
    fn garch_estimates_concentrate_near_the_truth() {
        // Calibration experiment: distance below 0.08 in at least 90% of
        // replications at n = 20000.
        let spec = full(ModelFamily::Garch { p: 1, q: 1 });
        let truth = ParamVector::new(&spec, vec![0.1, 0.2, 0.5]).unwrap();
        let opts = FitOptions {
            tol_x: 1e-6,
            tol_f: 1e-8,
            max_evals_per_dim: 600,
            random_starts: 2,
            seed: 0,
        };
        let mut hits = 0;
        for rep in 0..100 {
            let x =
                simulate(&spec, &truth, 20_000, 1000, InnovationLaw::Gaussian, 40_000 + rep)
                    .unwrap();
            let fit = fit(&spec, &x, &opts).unwrap();
            if fit.theta_hat.distance(&truth) <= 0.08 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "only {hits}/100 fits within 0.08 of the truth");
    }

    #[test]
    fn lil_statistic_applies_the_standardization() {
        let spec = full(ModelFamily::Ar { p: 1 });
        let a = ParamVector::new(&spec, vec![0.5, 1.0]).unwrap();
        let b = ParamVector::new(&spec, vec![0.53, 0.96]).unwrap();
        let n = 1000;
        let s = lil_statistic(&a, &b, n).unwrap();
        let dist = 0.05_f64;
        let expected = (n as f64 / (1000.0_f64).ln().ln()).sqrt() * dist;
        assert!((s - expected).abs() < 1e-12);
        assert!(lil_statistic(&a, &b, 8).is_err());
    }
}
