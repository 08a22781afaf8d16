//! Model families and their parameter layout.
//!
//! Each family fixes the ambient parameter dimension `d` and the meaning of
//! every coordinate.  The layouts are:
//!
//! | family                  | layout                                         | d             |
//! |-------------------------|------------------------------------------------|---------------|
//! | AR(p)                   | `(phi_1..phi_p, sigma2)`                       | `p + 1`       |
//! | ARCH(q)                 | `(omega, a_1..a_q)`                            | `q + 1`       |
//! | GARCH(p,q)              | `(omega, a_1..a_q, b_1..b_p)`                  | `p + q + 1`   |
//! | TARCH(q)                | `(omega, a+_1..a+_q, a-_1..a-_q)`              | `2q + 1`      |
//! | ARMA(p,q)-GARCH(P,Q)    | `(phi_1..phi_p, psi_1..psi_q, omega, a_1..a_Q, b_1..b_P)` | `p + q + P + Q + 1` |
//!
//! Conventions: `a_k` multiply lagged squared observations (or residuals),
//! `b_j` multiply lagged conditional variances, and GARCH(p,q) therefore reads
//!
//! ```text
//! H_t = omega + sum_{k=1..q} a_k X_{t-k}^2 + sum_{j=1..p} b_j H_{t-j}.
//! ```
//!
//! The innovation variance of AR models and the intercept `omega` of the
//! conditionally heteroskedastic families are *mandatory* coordinates: they
//! are active in every model built from the family and their box lower bound
//! must stay at or above the variance floor.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::spec::ParamBox;
use crate::Result;

/// Default box for autoregressive / moving-average coefficients.
const MEAN_COEF_BOUNDS: (f64, f64) = (-3.0, 3.0);
/// Default box for the innovation variance and the variance intercept.
const VARIANCE_BOUNDS: (f64, f64) = (1e-8, 1e4);
/// Default box for GARCH-type shock and variance-lag coefficients.
const GARCH_COEF_BOUNDS: (f64, f64) = (0.0, 0.9999);
/// Default box for threshold-ARCH slope coefficients.
const TARCH_COEF_BOUNDS: (f64, f64) = (0.0, 3.0);

/// One of the supported affine causal model families, carrying its orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum ModelFamily {
    /// Autoregression of order `p` with constant innovation variance.
    Ar {
        /// Number of mean lags.
        p: usize,
    },
    /// Pure ARCH with `q` shock lags.
    Arch {
        /// Number of squared-observation lags.
        q: usize,
    },
    /// GARCH with `p` variance lags and `q` shock lags.
    Garch {
        /// Number of lagged-variance terms (`b` coefficients).
        p: usize,
        /// Number of lagged-squared-observation terms (`a` coefficients).
        q: usize,
    },
    /// Threshold ARCH: the conditional scale reacts asymmetrically to the
    /// sign of past observations.
    Tarch {
        /// Number of lags (each lag carries one `a+` and one `a-` slope).
        q: usize,
    },
    /// ARMA mean with GARCH errors.
    ArmaGarch {
        /// AR order of the mean.
        p: usize,
        /// MA order of the mean.
        q: usize,
        /// Number of lagged-variance terms of the error process.
        big_p: usize,
        /// Number of lagged-squared-residual terms of the error process.
        big_q: usize,
    },
}

impl ModelFamily {
    /// Ambient parameter dimension `d` fixed by the family.
    pub fn dim(&self) -> usize {
        match *self {
            ModelFamily::Ar { p } => p + 1,
            ModelFamily::Arch { q } => q + 1,
            ModelFamily::Garch { p, q } => p + q + 1,
            ModelFamily::Tarch { q } => 2 * q + 1,
            ModelFamily::ArmaGarch { p, q, big_p, big_q } => p + q + big_p + big_q + 1,
        }
    }

    /// Checks the structural order invariants.
    ///
    /// A GARCH (or GARCH error block) with variance lags but no shock lags is
    /// rejected: with every `a_k = 0` absent, the variance recursion never
    /// sees the data and the `b` coefficients are unidentifiable.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelFamily::Garch { p, q } if p >= 1 && q == 0 => Err(Error::InvalidSpec {
                reason: format!("GARCH({p},{q}): variance lags require at least one shock lag"),
            }),
            ModelFamily::ArmaGarch { big_p, big_q, .. } if big_p >= 1 && big_q == 0 => {
                Err(Error::InvalidSpec {
                    reason: format!(
                        "ARMA-GARCH error block ({big_p},{big_q}): variance lags require at \
                         least one shock lag"
                    ),
                })
            }
            _ => Ok(()),
        }
    }

    /// Index of the mandatory coordinate: the innovation variance `sigma2`
    /// for AR, the intercept `omega` for every other family.
    pub fn mandatory_index(&self) -> usize {
        match *self {
            ModelFamily::Ar { p } => p,
            ModelFamily::Arch { .. } | ModelFamily::Garch { .. } | ModelFamily::Tarch { .. } => 0,
            ModelFamily::ArmaGarch { p, q, .. } => p + q,
        }
    }

    /// Whether coordinate `i` is constrained to be non-negative by the model
    /// geometry (variance intercepts and GARCH/TARCH slope coefficients).
    pub fn requires_nonnegative(&self, i: usize) -> bool {
        debug_assert!(i < self.dim());
        match *self {
            ModelFamily::Ar { p } => i == p,
            ModelFamily::Arch { .. } | ModelFamily::Garch { .. } | ModelFamily::Tarch { .. } => {
                true
            }
            ModelFamily::ArmaGarch { p, q, .. } => i >= p + q,
        }
    }

    /// Human-readable name of coordinate `i` (e.g. `phi1`, `omega`, `b2`).
    pub fn param_name(&self, i: usize) -> String {
        debug_assert!(i < self.dim());
        match *self {
            ModelFamily::Ar { p } => {
                if i < p {
                    format!("phi{}", i + 1)
                } else {
                    String::from("sigma2")
                }
            }
            ModelFamily::Arch { .. } => {
                if i == 0 {
                    String::from("omega")
                } else {
                    format!("a{i}")
                }
            }
            ModelFamily::Garch { q, .. } => {
                if i == 0 {
                    String::from("omega")
                } else if i <= q {
                    format!("a{i}")
                } else {
                    format!("b{}", i - q)
                }
            }
            ModelFamily::Tarch { q } => {
                if i == 0 {
                    String::from("omega")
                } else if i <= q {
                    format!("a_plus{i}")
                } else {
                    format!("a_minus{}", i - q)
                }
            }
            ModelFamily::ArmaGarch { p, q, big_q, .. } => {
                if i < p {
                    format!("phi{}", i + 1)
                } else if i < p + q {
                    format!("psi{}", i - p + 1)
                } else if i == p + q {
                    String::from("omega")
                } else if i <= p + q + big_q {
                    format!("a{}", i - p - q)
                } else {
                    format!("b{}", i - p - q - big_q)
                }
            }
        }
    }

    /// Order integers in declaration order (used by serialization layers).
    pub fn orders(&self) -> Vec<usize> {
        match *self {
            ModelFamily::Ar { p } => alloc::vec![p],
            ModelFamily::Arch { q } => alloc::vec![q],
            ModelFamily::Garch { p, q } => alloc::vec![p, q],
            ModelFamily::Tarch { q } => alloc::vec![q],
            ModelFamily::ArmaGarch { p, q, big_p, big_q } => alloc::vec![p, q, big_p, big_q],
        }
    }

    /// Display label such as `AR(2)` or `ARMA(1,1)-GARCH(1,1)`.
    pub fn label(&self) -> String {
        match *self {
            ModelFamily::Ar { p } => format!("AR({p})"),
            ModelFamily::Arch { q } => format!("ARCH({q})"),
            ModelFamily::Garch { p, q } => format!("GARCH({p},{q})"),
            ModelFamily::Tarch { q } => format!("TARCH({q})"),
            ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
                format!("ARMA({p},{q})-GARCH({big_p},{big_q})")
            }
        }
    }

    /// Default parameter box: generous finite bounds per coordinate role.
    ///
    /// Mean coefficients get `[-3, 3]` (covers the stationarity region of
    /// every AR(p) with p <= 3 and then some), variance intercepts get
    /// `[1e-8, 1e4]`, GARCH slopes `[0, 0.9999]` and TARCH slopes `[0, 3]`.
    pub fn default_box(&self) -> ParamBox {
        let d = self.dim();
        let mut lower = Vec::with_capacity(d);
        let mut upper = Vec::with_capacity(d);
        for i in 0..d {
            let (lo, hi) = self.default_bounds_for(i);
            lower.push(lo);
            upper.push(hi);
        }
        ParamBox::new(lower, upper).expect("default bounds are well-formed")
    }

    fn default_bounds_for(&self, i: usize) -> (f64, f64) {
        if i == self.mandatory_index() {
            return VARIANCE_BOUNDS;
        }
        match *self {
            ModelFamily::Ar { .. } => MEAN_COEF_BOUNDS,
            ModelFamily::Arch { .. } | ModelFamily::Garch { .. } => GARCH_COEF_BOUNDS,
            ModelFamily::Tarch { .. } => TARCH_COEF_BOUNDS,
            ModelFamily::ArmaGarch { p, q, .. } => {
                if i < p + q {
                    MEAN_COEF_BOUNDS
                } else {
                    GARCH_COEF_BOUNDS
                }
            }
        }
    }
}
