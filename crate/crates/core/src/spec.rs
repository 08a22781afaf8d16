//! Model specifications: active coordinate sets, parameter boxes, vectors.
//!
//! A [`ModelSpec`] pairs a [`ModelFamily`] with an *active set* — the sorted
//! subset of ambient coordinates the model is allowed to vary — and a compact
//! per-coordinate box.  Candidate models of one selection run share the same
//! ambient dimension `d` and differ only in their active sets; a coordinate
//! outside the active set is identically zero.  This makes "model" and
//! "sparsity pattern" interchangeable, which is exactly what the penalized
//! selection criterion needs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::family::ModelFamily;
use crate::math;
use crate::Result;

/// Per-coordinate closed interval bounds for the ambient parameter vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamBox {
    /// Builds a box, checking that every bound is finite and `lower <= upper`.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if lo > hi {
                return Err(Error::InvalidSpec {
                    reason: format!("box coordinate {i}: lower {lo} exceeds upper {hi}"),
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Lower bound of coordinate `i`.
    pub fn lower(&self, i: usize) -> f64 {
        self.lower[i]
    }

    /// Upper bound of coordinate `i`.
    pub fn upper(&self, i: usize) -> f64 {
        self.upper[i]
    }

    /// Interval width of coordinate `i`.
    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Midpoint of coordinate `i`.
    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.lower[i] + self.upper[i])
    }

    /// Clamps `v` into the interval of coordinate `i`.
    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.max(self.lower[i]).min(self.upper[i])
    }

    /// Whether coordinate `i` of `values` lies inside its interval.
    pub fn contains(&self, i: usize, v: f64) -> bool {
        v >= self.lower[i] && v <= self.upper[i]
    }
}

/// A model: family, active coordinate set, box, and variance floor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    family: ModelFamily,
    active: Vec<usize>,
    bounds: ParamBox,
    h_floor: f64,
}

impl ModelSpec {
    /// Default lower clamp for the conditional variance (`H_t >= h_floor`).
    pub const DEFAULT_H_FLOOR: f64 = 1e-8;

    /// Builds a spec with every structural invariant checked:
    ///
    /// * the family's order invariants hold;
    /// * `active` is strictly increasing, within `0..d`, and contains the
    ///   mandatory coordinate (innovation variance / `omega`);
    /// * the box has dimension `d`; on *active* coordinates the mandatory
    ///   lower bound is at least the variance floor and sign-constrained
    ///   coefficients have non-negative lower bounds.
    ///
    /// Boxes of inactive coordinates are ignored — those coordinates are
    /// pinned to zero regardless.
    pub fn new(family: ModelFamily, active: Vec<usize>, bounds: ParamBox) -> Result<Self> {
        Self::with_h_floor(family, active, bounds, Self::DEFAULT_H_FLOOR)
    }

    /// [`ModelSpec::new`] with an explicit variance floor `h_floor > 0`.
    pub fn with_h_floor(
        family: ModelFamily,
        active: Vec<usize>,
        bounds: ParamBox,
        h_floor: f64,
    ) -> Result<Self> {
        family.validate()?;
        let d = family.dim();
        if bounds.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: bounds.dim() });
        }
        if !(h_floor > 0.0) || !h_floor.is_finite() {
            return Err(Error::InvalidSpec {
                reason: format!("variance floor must be positive and finite, got {h_floor}"),
            });
        }
        for (k, &i) in active.iter().enumerate() {
            if i >= d {
                return Err(Error::InvalidSpec {
                    reason: format!("active index {i} out of range for dimension {d}"),
                });
            }
            if k > 0 && active[k - 1] >= i {
                return Err(Error::InvalidSpec {
                    reason: String::from("active set must be strictly increasing"),
                });
            }
        }
        let mandatory = family.mandatory_index();
        if !active.contains(&mandatory) {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "mandatory coordinate `{}` (index {mandatory}) must be active",
                    family.param_name(mandatory)
                ),
            });
        }
        for &i in &active {
            if i == mandatory && bounds.lower(i) < h_floor {
                return Err(Error::InvalidSpec {
                    reason: format!(
                        "lower bound of `{}` is {}, below the variance floor {h_floor}",
                        family.param_name(i),
                        bounds.lower(i)
                    ),
                });
            }
            if i != mandatory && family.requires_nonnegative(i) && bounds.lower(i) < 0.0 {
                return Err(Error::InvalidSpec {
                    reason: format!(
                        "coefficient `{}` must be non-negative but its lower bound is {}",
                        family.param_name(i),
                        bounds.lower(i)
                    ),
                });
            }
        }
        Ok(Self { family, active, bounds, h_floor })
    }

    /// Spec with every coordinate active and the family's default box.
    pub fn full(family: ModelFamily) -> Result<Self> {
        let active = (0..family.dim()).collect();
        Self::new(family, active, family.default_box())
    }

    /// The model family.
    pub fn family(&self) -> ModelFamily {
        self.family
    }

    /// Sorted active coordinate indices (zero-based).
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Whether ambient coordinate `i` is active.
    pub fn is_active(&self, i: usize) -> bool {
        self.active.binary_search(&i).is_ok()
    }

    /// Model dimension `|m|` (number of active coordinates).
    pub fn model_dim(&self) -> usize {
        self.active.len()
    }

    /// Ambient dimension `d` fixed by the family.
    pub fn ambient_dim(&self) -> usize {
        self.family.dim()
    }

    /// The parameter box.
    pub fn bounds(&self) -> &ParamBox {
        &self.bounds
    }

    /// The variance floor used to clamp conditional variances.
    pub fn h_floor(&self) -> f64 {
        self.h_floor
    }

    /// Whether this spec's active set is a strict superset of `other`'s.
    pub fn is_strict_superset_of(&self, other: &ModelSpec) -> bool {
        self.active.len() > other.active.len()
            && other.active.iter().all(|i| self.is_active(*i))
    }

    /// Stable identifier: ambient family plus active coordinate names, e.g.
    /// `AR(3)[phi1,sigma2]`.
    pub fn label(&self) -> String {
        let mut names = Vec::with_capacity(self.active.len());
        for &i in &self.active {
            names.push(self.family.param_name(i));
        }
        format!("{}[{}]", self.family.label(), names.join(","))
    }
}

/// A full `d`-dimensional parameter vector tied to an active set.
///
/// Coordinates outside the active set are exactly zero; this is enforced at
/// construction and preserved by every operation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamVector {
    values: Vec<f64>,
    active: Vec<usize>,
}

impl ParamVector {
    /// Builds a vector for `spec`, checking length, finiteness and that every
    /// inactive coordinate is exactly zero.  Box membership is *not* required
    /// here; use [`ParamVector::projected`] to clamp into the box.
    pub fn new(spec: &ModelSpec, values: Vec<f64>) -> Result<Self> {
        let d = spec.ambient_dim();
        if values.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: values.len() });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if !spec.is_active(i) && v != 0.0 {
                return Err(Error::InvalidSpec {
                    reason: format!(
                        "coordinate `{}` (index {i}) is inactive but has value {v}",
                        spec.family().param_name(i)
                    ),
                });
            }
        }
        Ok(Self { values, active: spec.active().to_vec() })
    }

    /// Embeds a reduced vector (one value per active coordinate, in active
    /// order) into the ambient space, zero-filling inactive coordinates.
    pub fn embed(spec: &ModelSpec, reduced: &[f64]) -> Result<Self> {
        if reduced.len() != spec.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.model_dim(),
                got: reduced.len(),
            });
        }
        let mut values = alloc::vec![0.0; spec.ambient_dim()];
        for (&i, &v) in spec.active().iter().zip(reduced) {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            values[i] = v;
        }
        Ok(Self { values, active: spec.active().to_vec() })
    }

    /// The full ambient values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of ambient coordinate `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// The active set this vector was built against.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// The active coordinates in active order (inverse of [`ParamVector::embed`]).
    pub fn restrict(&self) -> Vec<f64> {
        self.active.iter().map(|&i| self.values[i]).collect()
    }

    /// Copy with every active coordinate clamped into the spec's box.
    pub fn projected(&self, spec: &ModelSpec) -> ParamVector {
        let mut values = self.values.clone();
        for &i in &self.active {
            values[i] = spec.bounds().clamp(i, values[i]);
        }
        ParamVector { values, active: self.active.clone() }
    }

    /// Whether every active coordinate lies inside the spec's box.
    pub fn in_box(&self, spec: &ModelSpec) -> bool {
        self.active.iter().all(|&i| spec.bounds().contains(i, self.values[i]))
    }

    /// Euclidean distance to another vector over the full ambient space.
    pub fn distance(&self, other: &ParamVector) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        let mut sum = 0.0;
        for (a, b) in self.values.iter().zip(&other.values) {
            let diff = a - b;
            sum += diff * diff;
        }
        math::sqrt(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar2_spec() -> ModelSpec {
        ModelSpec::full(ModelFamily::Ar { p: 2 }).unwrap()
    }

    #[test]
    fn box_rejects_inverted_and_nonfinite_bounds() {
        assert!(ParamBox::new(alloc::vec![0.0], alloc::vec![-1.0]).is_err());
        assert!(ParamBox::new(alloc::vec![f64::NEG_INFINITY], alloc::vec![0.0]).is_err());
        assert!(ParamBox::new(alloc::vec![0.0, 0.0], alloc::vec![1.0]).is_err());
    }

    #[test]
    fn spec_requires_the_mandatory_coordinate() {
        let fam = ModelFamily::Ar { p: 2 };
        let err = ModelSpec::new(fam, alloc::vec![0, 1], fam.default_box()).unwrap_err();
        match err {
            Error::InvalidSpec { reason } => assert!(reason.contains("sigma2"), "{reason}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn spec_rejects_variance_lower_bound_below_floor() {
        let fam = ModelFamily::Arch { q: 1 };
        let bounds = ParamBox::new(alloc::vec![0.0, 0.0], alloc::vec![1.0, 1.0]).unwrap();
        let err = ModelSpec::new(fam, alloc::vec![0, 1], bounds).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { .. }));
    }

    #[test]
    fn spec_rejects_negative_lower_bound_for_garch_slopes() {
        let fam = ModelFamily::Garch { p: 1, q: 1 };
        let bounds =
            ParamBox::new(alloc::vec![1e-8, -0.5, 0.0], alloc::vec![1.0, 1.0, 1.0]).unwrap();
        assert!(ModelSpec::new(fam, alloc::vec![0, 1, 2], bounds).is_err());
    }

    #[test]
    fn inactive_coordinates_must_be_zero() {
        let fam = ModelFamily::Ar { p: 2 };
        let spec = ModelSpec::new(fam, alloc::vec![0, 2], fam.default_box()).unwrap();
        assert!(ParamVector::new(&spec, alloc::vec![0.5, 0.1, 1.0]).is_err());
        assert!(ParamVector::new(&spec, alloc::vec![0.5, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn embed_then_restrict_is_identity_on_active_coordinates() {
        let fam = ModelFamily::Garch { p: 1, q: 2 };
        let spec = ModelSpec::new(fam, alloc::vec![0, 2, 3], fam.default_box()).unwrap();
        let reduced = alloc::vec![0.3, 0.25, 0.5];
        let theta = ParamVector::embed(&spec, &reduced).unwrap();
        assert_eq!(theta.restrict(), reduced);
        assert_eq!(theta.get(1), 0.0);
    }

    #[test]
    fn projection_clamps_only_active_coordinates() {
        let spec = ar2_spec();
        let theta = ParamVector::new(&spec, alloc::vec![5.0, -4.0, 1.0]).unwrap();
        let proj = theta.projected(&spec);
        assert_eq!(proj.get(0), 3.0);
        assert_eq!(proj.get(1), -3.0);
        assert_eq!(proj.get(2), 1.0);
        assert!(proj.in_box(&spec));
    }

    #[test]
    fn strict_superset_detection() {
        let fam = ModelFamily::Ar { p: 2 };
        let small = ModelSpec::new(fam, alloc::vec![0, 2], fam.default_box()).unwrap();
        let big = ModelSpec::full(fam).unwrap();
        assert!(big.is_strict_superset_of(&small));
        assert!(!small.is_strict_superset_of(&big));
        assert!(!big.is_strict_superset_of(&big));
    }

    #[test]
    fn labels_name_the_active_coordinates() {
        let fam = ModelFamily::Ar { p: 3 };
        let spec = ModelSpec::new(fam, alloc::vec![0, 3], fam.default_box()).unwrap();
        assert_eq!(spec.label(), "AR(3)[phi1,sigma2]");
    }

    #[test]
    fn distance_is_full_dimensional_euclidean() {
        let spec = ar2_spec();
        let a = ParamVector::new(&spec, alloc::vec![0.5, 0.0, 1.0]).unwrap();
        let b = ParamVector::new(&spec, alloc::vec![0.5, 0.3, 1.4]).unwrap();
        assert!((a.distance(&b) - 0.5).abs() < 1e-15);
    }
}
