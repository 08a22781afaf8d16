//! Trend detection for rate statistics across sample sizes.
//!
//! Given replicated values of a statistic at several sample sizes, decides
//! whether the statistic stays bounded or grows with `ln n`.  Each
//! replication yields a Theil–Sen slope against `ln n`; the verdict comes
//! from a distribution-free confidence interval for the median slope.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::Result;

/// Two-sided 97.5% standard-normal quantile used by the median CI.
const Z_95: f64 = 1.959_963_984_540_054;

/// Boundedness verdict for a statistic observed across sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    /// The median slope against `ln n` is compatible with zero or negative.
    Bounded,
    /// The median slope is significantly positive: the statistic grows.
    Unbounded,
}

/// Result of a trend analysis over `ln n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrendSummary {
    /// Median over replications of the per-replication Theil–Sen slope.
    pub median_slope: f64,
    /// Lower end of the 95% order-statistic CI for the median slope.
    pub ci_lower: f64,
    /// Upper end of the 95% order-statistic CI for the median slope.
    pub ci_upper: f64,
    /// `Bounded` iff `ci_lower <= 0`.
    pub verdict: Verdict,
    /// Median of the finite samples at each `n` (`None` where none are).
    pub per_n_median: Vec<Option<f64>>,
}

/// Median of a non-empty slice (averages the two central order statistics
/// for even lengths).  The slice is sorted in place.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).expect("median input must not contain NaN"));
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    }
}

/// Theil–Sen slope of `y` against `x`: the median of all pairwise slopes.
/// Returns `None` when fewer than two points are available.
fn theil_sen_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let mut slopes = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for (i, &(xi, yi)) in points.iter().enumerate() {
        for &(xj, yj) in &points[i + 1..] {
            slopes.push((yj - yi) / (xj - xi));
        }
    }
    Some(median_in_place(&mut slopes))
}

/// Decides whether a statistic grows with `ln n`.
///
/// `samples_per_n[i]` holds the replicated values at sample size
/// `n_grid[i]`; all inner vectors must have the same length, aligned so that
/// index `r` is replication `r` throughout.  NaN entries mark replications
/// where the statistic was unavailable at that `n` and are skipped.
///
/// # Errors
///
/// * [`Error::InvalidSpec`] — `n_grid` not strictly increasing or empty.
/// * [`Error::DimensionMismatch`] — ragged input.
/// * [`Error::InsufficientData`] — fewer than three sample sizes carrying
///   finite values, or no replication observed at two or more sizes.
pub fn trend_over_log_n(n_grid: &[usize], samples_per_n: &[Vec<f64>]) -> Result<TrendSummary> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec {
            reason: "sample-size grid must be non-empty and strictly increasing".into(),
        });
    }
    if samples_per_n.len() != n_grid.len() {
        return Err(Error::DimensionMismatch {
            expected: n_grid.len(),
            got: samples_per_n.len(),
        });
    }
    let reps = samples_per_n[0].len();
    if let Some(bad) = samples_per_n.iter().find(|s| s.len() != reps) {
        return Err(Error::DimensionMismatch { expected: reps, got: bad.len() });
    }

    let informative = samples_per_n.iter().filter(|s| s.iter().any(|v| v.is_finite())).count();
    if informative < 3 {
        return Err(Error::InsufficientData {
            reason: format!(
                "trend analysis needs finite samples at >= 3 sample sizes, found {informative}"
            ),
        });
    }

    let per_n_median: Vec<Option<f64>> = samples_per_n
        .iter()
        .map(|samples| {
            let mut finite: Vec<f64> = samples.iter().copied().filter(|v| v.is_finite()).collect();
            if finite.is_empty() {
                None
            } else {
                Some(median_in_place(&mut finite))
            }
        })
        .collect();

    let log_n: Vec<f64> = n_grid.iter().map(|&n| math::ln(n as f64)).collect();
    let mut slopes: Vec<f64> = (0..reps)
        .filter_map(|r| {
            let points: Vec<(f64, f64)> = log_n
                .iter()
                .zip(samples_per_n)
                .filter(|(_, samples)| samples[r].is_finite())
                .map(|(&x, samples)| (x, samples[r]))
                .collect();
            theil_sen_slope(&points)
        })
        .collect();
    if slopes.is_empty() {
        return Err(Error::InsufficientData {
            reason: "no replication carries finite values at two or more sample sizes".into(),
        });
    }

    let median_slope = median_in_place(&mut slopes);
    let r = slopes.len();
    // Distribution-free CI for the median: order statistics at ranks
    // R/2 -/+ z*sqrt(R)/2, clamped into [1, R].
    let half_width = Z_95 * math::sqrt(r as f64) / 2.0;
    let lo_rank = (math::floor(r as f64 / 2.0 - half_width).max(1.0) as usize).min(r);
    let hi_rank = (math::ceil(r as f64 / 2.0 + half_width + 1.0).min(r as f64) as usize).max(1);
    let ci_lower = slopes[lo_rank - 1];
    let ci_upper = slopes[hi_rank - 1];
    let verdict = if ci_lower <= 0.0 { Verdict::Bounded } else { Verdict::Unbounded };

    Ok(TrendSummary { median_slope, ci_lower, ci_upper, verdict, per_n_median })
}
