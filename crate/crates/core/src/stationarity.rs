//! Stationarity-region membership via Lipschitz-coefficient sums.
//!
//! A parameter point admits a stationary, ergodic solution with a finite
//! `r`-th moment when the contraction inequality
//!
//! ```text
//! sum_k alpha_k(f) + ||xi||_r * sum_k alpha_k(M) < 1
//! ```
//!
//! holds, where `alpha_k(f)` / `alpha_k(M)` are Lipschitz coefficients of the
//! conditional mean / scale with respect to the lag-`k` input.  For purely
//! conditionally heteroskedastic models (`f = 0`) the weaker squared-variance
//! form `||xi||_r^2 * sum_k alpha_k(H) < 1` applies instead.  Closed forms
//! per family:
//!
//! * AR / ARMA mean: `alpha_k(f)` are the magnitudes of the AR(infinity)
//!   coefficients of the mean; the scale is constant, so its sum is zero.
//! * ARCH / GARCH: `alpha_k(H)` are the ARCH(infinity) weights, with
//!   `sum = (sum a_i) / (1 - sum b_j)`.
//! * TARCH: `alpha_k(M) = max(a+_k, a-_k)`.
//! * ARMA-GARCH: the mean sum as for ARMA, plus
//!   `||xi||_r * (sum_m sqrt(psi_m)) * (sum_l |delta_l|)` where `psi` are the
//!   ARCH(infinity) weights of the error block and `delta` the AR(infinity)
//!   representation of the residual map.
//!
//! Infinite series are evaluated to 2048 terms with a geometric tail bound
//! estimated from the trailing terms; a series that does not appear to decay
//! geometrically is treated as divergent (fail closed).

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::family::ModelFamily;
use crate::spec::{ModelSpec, ParamVector};
use crate::Result;

/// Number of power-series terms computed before applying the tail bound.
const SERIES_TERMS: usize = 2048;
/// Trailing-window length used to estimate the geometric decay rate.
const TAIL_WINDOW: usize = 64;

/// Outcome of a stationarity-region membership check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StationarityCheck {
    /// Whether the strict contraction inequality holds.
    pub in_theta_r: bool,
    /// Slack `1 - lhs` of the inequality; negative when violated and
    /// `-inf` when the defining series has no finite value at all
    /// (serialized as `null` in the `-inf` case).
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_util::neg_inf_as_null"))]
    pub margin: f64,
}

impl StationarityCheck {
    fn from_lhs(lhs: f64) -> Self {
        if lhs.is_finite() {
            StationarityCheck { in_theta_r: lhs < 1.0, margin: 1.0 - lhs }
        } else {
            StationarityCheck { in_theta_r: false, margin: f64::NEG_INFINITY }
        }
    }

    fn divergent() -> Self {
        StationarityCheck { in_theta_r: false, margin: f64::NEG_INFINITY }
    }
}

/// Checks membership of `theta` in the stationarity region for the moment
/// order whose innovation norm `||xi||_r = xi_norm_r` is supplied by the
/// caller (see [`crate::InnovationLaw::norm_r`]).
///
/// Returns the strict-inequality verdict together with the slack margin.
///
/// # Errors
///
/// Rejects a non-positive or non-finite `xi_norm_r`, and propagates
/// spec/parameter mismatches.
pub fn check_theta_r(
    spec: &ModelSpec,
    theta: &ParamVector,
    xi_norm_r: f64,
) -> Result<StationarityCheck> {
    if !(xi_norm_r > 0.0) || !xi_norm_r.is_finite() {
        return Err(Error::MomentUndefined {
            reason: format!("innovation norm must be positive and finite, got {xi_norm_r}"),
        });
    }
    if theta.values().len() != spec.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.ambient_dim(),
            got: theta.values().len(),
        });
    }
    let v = theta.values();
    Ok(match spec.family() {
        // Constant scale: only the mean contracts.
        ModelFamily::Ar { p } => {
            let lhs: f64 = v[..p].iter().map(|c| c.abs()).sum();
            StationarityCheck::from_lhs(lhs)
        }
        // f = 0: the squared-variance branch with ARCH weights a_k.
        ModelFamily::Arch { q } => {
            let a_sum: f64 = v[1..=q].iter().sum();
            StationarityCheck::from_lhs(xi_norm_r * xi_norm_r * a_sum)
        }
        // f = 0: ARCH(infinity) weight sum (sum a) / (1 - sum b).
        ModelFamily::Garch { p, q } => {
            let a_sum: f64 = v[1..=q].iter().sum();
            let b_sum: f64 = v[q + 1..=q + p].iter().sum();
            if b_sum >= 1.0 {
                StationarityCheck::divergent()
            } else {
                StationarityCheck::from_lhs(xi_norm_r * xi_norm_r * a_sum / (1.0 - b_sum))
            }
        }
        // The scale is Lipschitz with coefficient max(a+_k, a-_k) per lag.
        ModelFamily::Tarch { q } => {
            let mut sum = 0.0;
            for k in 0..q {
                sum += v[1 + k].abs().max(v[1 + q + k].abs());
            }
            StationarityCheck::from_lhs(xi_norm_r * sum)
        }
        ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
            let phi = &v[..p];
            let psi = &v[p..p + q];
            let a = &v[p + q + 1..=p + q + big_q];
            let b = &v[p + q + big_q + 1..=p + q + big_q + big_p];
            check_arma_garch(phi, psi, a, b, xi_norm_r)
        }
    })
}

fn check_arma_garch(
    phi: &[f64],
    psi: &[f64],
    a: &[f64],
    b: &[f64],
    xi_norm_r: f64,
) -> StationarityCheck {
    let b_sum: f64 = b.iter().sum();
    let a_sum: f64 = a.iter().sum();
    if b_sum >= 1.0 {
        return StationarityCheck::divergent();
    }

    // Degenerate mean: fall through to the pure-GARCH variance branch,
    // which is the sharper criterion when f = 0.
    if phi.is_empty() && psi.is_empty() {
        return StationarityCheck::from_lhs(xi_norm_r * xi_norm_r * a_sum / (1.0 - b_sum));
    }

    // Mean part: |coefficients| of (Phi + Psi)(z) / (1 + Psi(z)), the
    // dependence of the conditional mean on lagged observations.
    let mut num = alloc::vec![0.0; phi.len().max(psi.len()) + 1];
    for (i, &c) in phi.iter().enumerate() {
        num[i + 1] += c;
    }
    for (j, &c) in psi.iter().enumerate() {
        num[j + 1] += c;
    }
    let mut den = alloc::vec![0.0; psi.len() + 1];
    den[0] = 1.0;
    den[1..].copy_from_slice(psi);

    let mean_series = series_div(&num, &den, SERIES_TERMS);
    let mean_sum = match abs_sum_with_geometric_tail(&mean_series) {
        Some(s) => s,
        None => return StationarityCheck::divergent(),
    };

    // Scale part: sqrt of the error block's ARCH(infinity) weights ...
    let scale_sum = if a.is_empty() {
        0.0
    } else {
        let mut arch_num = alloc::vec![0.0; a.len() + 1];
        arch_num[1..].copy_from_slice(a);
        let mut arch_den = alloc::vec![0.0; b.len() + 1];
        arch_den[0] = 1.0;
        for (j, &c) in b.iter().enumerate() {
            arch_den[j + 1] = -c;
        }
        let weights = series_div(&arch_num, &arch_den, SERIES_TERMS);
        let roots: Vec<f64> = weights.iter().map(|w| crate::math::sqrt(w.max(0.0))).collect();
        let sqrt_psi_sum = match abs_sum_with_geometric_tail(&roots) {
            Some(s) => s,
            None => return StationarityCheck::divergent(),
        };

        // ... times the l1 norm of the residual map delta(z) = Phi(z)/Psi(z)
        // (delta_0 = 1), which converts residual lags back to observation lags.
        let mut delta_num = alloc::vec![0.0; phi.len() + 1];
        delta_num[0] = 1.0;
        for (i, &c) in phi.iter().enumerate() {
            delta_num[i + 1] = -c;
        }
        let delta_series = series_div(&delta_num, &den, SERIES_TERMS);
        let delta_sum = match abs_sum_with_geometric_tail(&delta_series) {
            Some(s) => s,
            None => return StationarityCheck::divergent(),
        };
        sqrt_psi_sum * delta_sum
    };

    StationarityCheck::from_lhs(mean_sum + xi_norm_r * scale_sum)
}

/// First `terms` coefficients of the power series `num(z) / den(z)`;
/// requires `den[0] != 0`.
fn series_div(num: &[f64], den: &[f64], terms: usize) -> Vec<f64> {
    debug_assert!(den[0] != 0.0);
    let mut out = alloc::vec![0.0; terms];
    for k in 0..terms {
        let mut c = if k < num.len() { num[k] } else { 0.0 };
        for j in 1..den.len().min(k + 1) {
            c -= den[j] * out[k - j];
        }
        out[k] = c / den[0];
    }
    out
}

/// Sum of `|c_k|` over all `k`, combining the computed prefix with a
/// geometric bound for the tail.  The decay rate is estimated from the last
/// two windows of trailing terms; `None` means the series does not decay
/// (treated as divergent by callers).
fn abs_sum_with_geometric_tail(coeffs: &[f64]) -> Option<f64> {
    debug_assert!(coeffs.len() >= 2 * TAIL_WINDOW);
    let mut sum = 0.0;
    for &c in coeffs {
        if !c.is_finite() {
            return None;
        }
        sum += c.abs();
    }
    let n = coeffs.len();
    let last = coeffs[n - TAIL_WINDOW..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if last == 0.0 {
        return Some(sum); // series terminated: exact
    }
    let prev = coeffs[n - 2 * TAIL_WINDOW..n - TAIL_WINDOW]
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    if prev <= last {
        return None; // not decaying
    }
    let rho = crate::math::powf(last / prev, 1.0 / TAIL_WINDOW as f64);
    if !(rho < 0.9999) {
        return None; // too slow to bound reliably
    }
    Some(sum + last * rho / (1.0 - rho))
}
