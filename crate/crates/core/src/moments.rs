//! Conditional mean/variance recursions under the zero-past convention.
//!
//! The observable ("hat") versions of the conditional mean `f_t` and variance
//! `H_t` treat every pre-sample observation as zero.  GARCH-type recursions
//! additionally need pre-sample variances; these are set to `omega / (1 - sum
//! b_j)`, which is the exact value the zero-past ARCH(infinity) expansion
//! assigns (falling back to `omega` when `sum b_j >= 1`, where the expansion
//! has no finite value).  ARMA residual recursions initialize pre-sample
//! residuals to zero.
//!
//! Every variance is clamped from below at the spec's `h_floor` before use
//! *and* before being fed back into the recursion, so downstream code can
//! rely on `H_t >= h_floor` unconditionally.
//!
//! The same [`Stepper`] drives both likelihood evaluation (pushing observed
//! values) and simulation (pushing generated values), so the two cannot
//! drift apart.

use alloc::vec::Vec;

use crate::error::Error;
use crate::family::ModelFamily;
use crate::simulate::Trajectory;
use crate::spec::{ModelSpec, ParamVector};
use crate::Result;

/// Conditional means and variances for `t = 1..n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionalMoments {
    /// Conditional means `f_t` (zero-past convention).
    pub f_hat: Vec<f64>,
    /// Conditional variances `H_t`, clamped at the spec's variance floor.
    pub h_hat: Vec<f64>,
}

/// Fixed-capacity lag buffer; `lag(k)` is the value pushed `k` steps ago.
///
/// Capacity zero is allowed and makes `push` a no-op.
#[derive(Debug, Clone)]
struct Ring {
    buf: Vec<f64>,
    pos: usize,
}

impl Ring {
    fn filled(cap: usize, value: f64) -> Self {
        Self { buf: alloc::vec![value; cap], pos: 0 }
    }

    #[inline]
    fn push(&mut self, v: f64) {
        let cap = self.buf.len();
        if cap > 0 {
            self.pos = (self.pos + cap - 1) % cap;
            self.buf[self.pos] = v;
        }
    }

    /// Value pushed `k` steps ago, `1 <= k <= cap`; the fill value before.
    #[inline]
    fn lag(&self, k: usize) -> f64 {
        let cap = self.buf.len();
        debug_assert!(k >= 1 && k <= cap);
        self.buf[(self.pos + k - 1) % cap]
    }
}

#[inline]
fn floor_variance(h: f64, h_floor: f64) -> f64 {
    // Written so that NaN propagates instead of being masked by the clamp.
    if h < h_floor {
        h_floor
    } else {
        h
    }
}

/// Pre-sample variance of a GARCH block: the zero-past ARCH(infinity) value
/// `omega / (1 - sum b_j)`, falling back to `omega` outside that region, then
/// floored.
fn presample_variance(omega: f64, b: &[f64], h_floor: f64) -> f64 {
    let b_sum: f64 = b.iter().sum();
    let h = if b_sum < 1.0 { omega / (1.0 - b_sum) } else { omega };
    floor_variance(h, h_floor)
}

#[derive(Debug, Clone)]
enum State {
    Ar {
        phi: Vec<f64>,
        variance: f64,
        xs: Ring,
    },
    Arch {
        omega: f64,
        a: Vec<f64>,
        x2: Ring,
    },
    Garch {
        omega: f64,
        a: Vec<f64>,
        b: Vec<f64>,
        x2: Ring,
        hs: Ring,
    },
    Tarch {
        omega: f64,
        a_plus: Vec<f64>,
        a_minus: Vec<f64>,
        xs: Ring,
    },
    ArmaGarch {
        phi: Vec<f64>,
        psi: Vec<f64>,
        omega: f64,
        a: Vec<f64>,
        b: Vec<f64>,
        xs: Ring,
        eps: Ring,
        hs: Ring,
    },
}

/// Streaming evaluator of the model recursion.
///
/// Strict call order per time step: [`Stepper::moments`] to obtain
/// `(f_t, H_t)` from the past, then [`Stepper::push`] with the realized
/// `X_t`.  The alternation is checked by debug assertions.
#[derive(Debug, Clone)]
pub(crate) struct Stepper {
    state: State,
    h_floor: f64,
    pending_f: f64,
    pending_h: f64,
    armed: bool,
}

impl Stepper {
    pub(crate) fn new(spec: &ModelSpec, theta: &ParamVector) -> Result<Self> {
        if theta.values().len() != spec.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.ambient_dim(),
                got: theta.values().len(),
            });
        }
        if theta.active() != spec.active() {
            return Err(Error::InvalidSpec {
                reason: alloc::string::String::from(
                    "parameter vector was built for a different active set",
                ),
            });
        }
        let v = theta.values();
        let h_floor = spec.h_floor();
        let state = match spec.family() {
            ModelFamily::Ar { p } => State::Ar {
                phi: v[..p].to_vec(),
                variance: floor_variance(v[p], h_floor),
                xs: Ring::filled(p, 0.0),
            },
            ModelFamily::Arch { q } => State::Arch {
                omega: v[0],
                a: v[1..=q].to_vec(),
                x2: Ring::filled(q, 0.0),
            },
            ModelFamily::Garch { p, q } => {
                let b = v[q + 1..=q + p].to_vec();
                let h_pre = presample_variance(v[0], &b, h_floor);
                State::Garch {
                    omega: v[0],
                    a: v[1..=q].to_vec(),
                    b,
                    x2: Ring::filled(q, 0.0),
                    hs: Ring::filled(p, h_pre),
                }
            }
            ModelFamily::Tarch { q } => State::Tarch {
                omega: v[0],
                a_plus: v[1..=q].to_vec(),
                a_minus: v[q + 1..=2 * q].to_vec(),
                xs: Ring::filled(q, 0.0),
            },
            ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
                let omega = v[p + q];
                let b = v[p + q + big_q + 1..].to_vec();
                let h_pre = presample_variance(omega, &b, h_floor);
                State::ArmaGarch {
                    phi: v[..p].to_vec(),
                    psi: v[p..p + q].to_vec(),
                    omega,
                    a: v[p + q + 1..=p + q + big_q].to_vec(),
                    b,
                    xs: Ring::filled(p, 0.0),
                    eps: Ring::filled(q.max(big_q), 0.0),
                    hs: Ring::filled(big_p, h_pre),
                }
            }
        };
        Ok(Self { state, h_floor, pending_f: 0.0, pending_h: 0.0, armed: false })
    }

    /// Conditional `(f_t, H_t)` given everything pushed so far.
    #[inline]
    pub(crate) fn moments(&mut self) -> (f64, f64) {
        debug_assert!(!self.armed, "moments called twice without push");
        let (f, h_raw) = match &self.state {
            State::Ar { phi, variance, xs } => {
                let mut f = 0.0;
                for (k, &c) in phi.iter().enumerate() {
                    f += c * xs.lag(k + 1);
                }
                (f, *variance)
            }
            State::Arch { omega, a, x2 } => {
                let mut h = *omega;
                for (k, &c) in a.iter().enumerate() {
                    h += c * x2.lag(k + 1);
                }
                (0.0, h)
            }
            State::Garch { omega, a, b, x2, hs } => {
                let mut h = *omega;
                for (k, &c) in a.iter().enumerate() {
                    h += c * x2.lag(k + 1);
                }
                for (j, &c) in b.iter().enumerate() {
                    h += c * hs.lag(j + 1);
                }
                (0.0, h)
            }
            State::Tarch { omega, a_plus, a_minus, xs } => {
                let mut m = *omega;
                for k in 0..a_plus.len() {
                    let x = xs.lag(k + 1);
                    m += a_plus[k] * x.max(0.0) - a_minus[k] * x.min(0.0);
                }
                (0.0, m * m)
            }
            State::ArmaGarch { phi, psi, omega, a, b, xs, eps, hs } => {
                let mut f = 0.0;
                for (k, &c) in phi.iter().enumerate() {
                    f += c * xs.lag(k + 1);
                }
                for (j, &c) in psi.iter().enumerate() {
                    f += c * eps.lag(j + 1);
                }
                let mut h = *omega;
                for (k, &c) in a.iter().enumerate() {
                    let e = eps.lag(k + 1);
                    h += c * e * e;
                }
                for (j, &c) in b.iter().enumerate() {
                    h += c * hs.lag(j + 1);
                }
                (f, h)
            }
        };
        let h = floor_variance(h_raw, self.h_floor);
        self.pending_f = f;
        self.pending_h = h;
        self.armed = true;
        (f, h)
    }

    /// Absorbs the realized `X_t` after the matching [`Stepper::moments`] call.
    ///
    /// GARCH-type states feed the *floored* variance back into the recursion.
    #[inline]
    pub(crate) fn push(&mut self, x_t: f64) {
        debug_assert!(self.armed, "push called without a preceding moments call");
        self.armed = false;
        match &mut self.state {
            State::Ar { xs, .. } => xs.push(x_t),
            State::Arch { x2, .. } => x2.push(x_t * x_t),
            State::Garch { x2, hs, .. } => {
                hs.push(self.pending_h);
                x2.push(x_t * x_t);
            }
            State::Tarch { xs, .. } => xs.push(x_t),
            State::ArmaGarch { xs, eps, hs, .. } => {
                hs.push(self.pending_h);
                eps.push(x_t - self.pending_f);
                xs.push(x_t);
            }
        }
    }

    /// `Some(H)` when the conditional variance does not depend on the data.
    pub(crate) fn constant_variance(&self) -> Option<f64> {
        match &self.state {
            State::Ar { variance, .. } => Some(floor_variance(*variance, self.h_floor)),
            State::Arch { omega, a, .. } if a.is_empty() => {
                Some(floor_variance(*omega, self.h_floor))
            }
            State::Garch { omega, a, b, .. } if a.is_empty() && b.is_empty() => {
                Some(floor_variance(*omega, self.h_floor))
            }
            State::Tarch { omega, a_plus, .. } if a_plus.is_empty() => {
                Some(floor_variance(*omega * *omega, self.h_floor))
            }
            State::ArmaGarch { omega, a, b, .. } if a.is_empty() && b.is_empty() => {
                Some(floor_variance(*omega, self.h_floor))
            }
            _ => None,
        }
    }
}

/// Computes the zero-past conditional moments of `x` under `(spec, theta)`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] / [`Error::InvalidSpec`] when `theta` does not
/// match `spec`.  Non-finite observations are rejected by [`Trajectory`]
/// construction and cannot reach this function.
pub fn hat_moments(
    spec: &ModelSpec,
    theta: &ParamVector,
    x: &Trajectory,
) -> Result<ConditionalMoments> {
    let values = x.values();
    let mut stepper = Stepper::new(spec, theta)?;
    let mut f_hat = Vec::with_capacity(values.len());
    let mut h_hat = Vec::with_capacity(values.len());
    for &x_t in values {
        let (f, h) = stepper.moments();
        f_hat.push(f);
        h_hat.push(h);
        stepper.push(x_t);
    }
    Ok(ConditionalMoments { f_hat, h_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn spec_of(family: ModelFamily) -> ModelSpec {
        ModelSpec::full(family).unwrap()
    }

    fn theta_of(spec: &ModelSpec, values: Vec<f64>) -> ParamVector {
        ParamVector::new(spec, values).unwrap()
    }

    fn traj(values: Vec<f64>) -> Trajectory {
        Trajectory::new(values).unwrap()
    }

    #[test]
    fn ar1_zero_past_forces_first_mean_to_zero() {
        let spec = spec_of(ModelFamily::Ar { p: 1 });
        let theta = theta_of(&spec, vec![0.5, 1.0]);
        let m = hat_moments(&spec, &theta, &traj(vec![1.0, 2.0])).unwrap();
        assert_eq!(m.f_hat, vec![0.0, 0.5]);
        assert_eq!(m.h_hat, vec![1.0, 1.0]);
    }

    #[test]
    fn arch1_recursion_matches_hand_computation() {
        let spec = spec_of(ModelFamily::Arch { q: 1 });
        let theta = theta_of(&spec, vec![0.1, 0.3]);
        let m = hat_moments(&spec, &theta, &traj(vec![1.0, 1.0])).unwrap();
        assert_eq!(m.f_hat, vec![0.0, 0.0]);
        assert!((m.h_hat[0] - 0.1).abs() < 1e-15);
        assert!((m.h_hat[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn garch11_uses_the_stationary_presample_variance() {
        let spec = spec_of(ModelFamily::Garch { p: 1, q: 1 });
        let theta = theta_of(&spec, vec![0.1, 0.2, 0.5]);
        let m = hat_moments(&spec, &theta, &traj(vec![1.0, 1.0])).unwrap();
        // presample H = omega / (1 - b) = 0.2
        assert!((m.h_hat[0] - 0.2).abs() < 1e-15);
        // H_2 = 0.1 + 0.2 * 1 + 0.5 * 0.2 = 0.4
        assert!((m.h_hat[1] - 0.4).abs() < 1e-15);
    }

    /// Independent oracle: the zero-past GARCH(1,1) variance in closed form,
    /// `H_t = omega/(1-b) + a * sum_{j=1..t-1} b^(j-1) x_{t-j}^2`.
    fn garch11_archinf_oracle(omega: f64, a: f64, b: f64, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for t in 1..=x.len() {
            let mut h = omega / (1.0 - b);
            let mut w = a;
            for j in 1..t {
                h += w * x[t - 1 - j] * x[t - 1 - j];
                w *= b;
            }
            out.push(h);
        }
        out
    }

    #[test]
    fn garch11_matches_truncated_arch_infinity_expansion() {
        let spec = spec_of(ModelFamily::Garch { p: 1, q: 1 });
        let theta = theta_of(&spec, vec![0.3, 0.25, 0.6]);
        let x: Vec<f64> = (0..100).map(|i| ((i * 37 % 19) as f64 - 9.0) / 4.0).collect();
        let m = hat_moments(&spec, &theta, &traj(x.clone())).unwrap();
        let oracle = garch11_archinf_oracle(0.3, 0.25, 0.6, &x);
        for (got, want) in m.h_hat.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10, "got {got}, oracle {want}");
        }
    }

    #[test]
    fn tarch_reacts_asymmetrically_and_respects_the_floor() {
        let spec = spec_of(ModelFamily::Tarch { q: 1 });
        let theta = theta_of(&spec, vec![1e-4, 0.5, 0.9]);
        let m = hat_moments(&spec, &theta, &traj(vec![1.0, -1.0, 0.0])).unwrap();
        // t=1: M = omega = 1e-4, M^2 = 1e-8 = the floor exactly
        assert_eq!(m.h_hat[0], 1e-8);
        // t=2: M = 1e-4 + 0.5 * 1 (positive shock uses a_plus)
        assert!((m.h_hat[1] - 0.5001_f64 * 0.5001).abs() < 1e-12);
        // t=3: M = 1e-4 + 0.9 * 1 (negative shock uses a_minus)
        assert!((m.h_hat[2] - 0.9001_f64 * 0.9001).abs() < 1e-12);
    }

    #[test]
    fn tarch_variance_is_clamped_at_the_floor() {
        // A raised floor needs a box whose omega lower bound respects it.
        let fam = ModelFamily::Tarch { q: 1 };
        let bounds =
            crate::spec::ParamBox::new(vec![1e-6, 0.0, 0.0], vec![1e4, 3.0, 3.0]).unwrap();
        let spec = ModelSpec::with_h_floor(fam, vec![0, 1, 2], bounds, 1e-6).unwrap();
        let theta = theta_of(&spec, vec![1e-4, 0.1, 0.1]);
        let m = hat_moments(&spec, &theta, &traj(vec![0.0, 0.0])).unwrap();
        // M^2 = 1e-8 < h_floor = 1e-6 -> clamped.
        assert_eq!(m.h_hat, vec![1e-6, 1e-6]);
    }

    #[test]
    fn arma_garch_residual_recursion_matches_hand_computation() {
        // ARMA(1,1)-GARCH(1,1): phi=0.5, psi=0.3, omega=0.1, a=0.2, b=0.5
        let spec = spec_of(ModelFamily::ArmaGarch { p: 1, q: 1, big_p: 1, big_q: 1 });
        let theta = theta_of(&spec, vec![0.5, 0.3, 0.1, 0.2, 0.5]);
        let x = vec![1.0, 2.0, -1.0];
        let m = hat_moments(&spec, &theta, &traj(x)).unwrap();

        // By hand: eps_0 = 0, H_pre = 0.1/0.5 = 0.2.
        // t=1: f = 0, H = 0.1 + 0.2*0 + 0.5*0.2 = 0.2; eps_1 = 1.
        // t=2: f = 0.5*1 + 0.3*1 = 0.8; H = 0.1 + 0.2*1 + 0.5*0.2 = 0.4; eps_2 = 1.2.
        // t=3: f = 0.5*2 + 0.3*1.2 = 1.36; H = 0.1 + 0.2*1.44 + 0.5*0.4 = 0.588.
        assert!((m.f_hat[0] - 0.0).abs() < 1e-15);
        assert!((m.h_hat[0] - 0.2).abs() < 1e-15);
        assert!((m.f_hat[1] - 0.8).abs() < 1e-15);
        assert!((m.h_hat[1] - 0.4).abs() < 1e-15);
        assert!((m.f_hat[2] - 1.36).abs() < 1e-15);
        assert!((m.h_hat[2] - 0.588).abs() < 1e-12);
    }

    #[test]
    fn inactive_coordinates_drop_out_of_the_recursion() {
        // AR(2) with only phi2 active behaves like a seasonal lag-2 model.
        let fam = ModelFamily::Ar { p: 2 };
        let spec = ModelSpec::new(fam, vec![1, 2], fam.default_box()).unwrap();
        let theta = ParamVector::new(&spec, vec![0.0, 0.7, 1.0]).unwrap();
        let m = hat_moments(&spec, &theta, &traj(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(m.f_hat, vec![0.0, 0.0, 0.7]);
    }

    proptest! {
        #[test]
        fn prefix_property_holds_for_garch(
            omega in 0.01_f64..1.0,
            a in 0.0_f64..0.5,
            b in 0.0_f64..0.9,
            seed_vals in proptest::collection::vec(-3.0_f64..3.0, 2..40),
            split in 1_usize..39,
        ) {
            prop_assume!(split < seed_vals.len());
            let spec = spec_of(ModelFamily::Garch { p: 1, q: 1 });
            let theta = theta_of(&spec, vec![omega, a, b]);
            let full = hat_moments(&spec, &theta, &traj(seed_vals.clone())).unwrap();
            let prefix = hat_moments(
                &spec,
                &theta,
                &traj(seed_vals[..split].to_vec()),
            ).unwrap();
            prop_assert_eq!(&full.f_hat[..split], &prefix.f_hat[..]);
            prop_assert_eq!(&full.h_hat[..split], &prefix.h_hat[..]);
        }

        #[test]
        fn variance_floor_holds_for_every_family(
            x_vals in proptest::collection::vec(-5.0_f64..5.0, 1..30),
            u in proptest::collection::vec(0.0_f64..1.0, 8),
        ) {
            let cases: Vec<(ModelSpec, Vec<f64>)> = vec![
                (
                    spec_of(ModelFamily::Ar { p: 2 }),
                    vec![2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, 1e-8 + u[2]],
                ),
                (
                    spec_of(ModelFamily::Arch { q: 1 }),
                    vec![1e-8 + u[0], 0.9 * u[1]],
                ),
                (
                    spec_of(ModelFamily::Garch { p: 1, q: 1 }),
                    vec![1e-8 + u[0], 0.5 * u[1], 0.9 * u[2]],
                ),
                (
                    spec_of(ModelFamily::Tarch { q: 1 }),
                    vec![1e-8 + u[0], u[1], u[2]],
                ),
                (
                    spec_of(ModelFamily::ArmaGarch { p: 1, q: 1, big_p: 1, big_q: 1 }),
                    vec![2.0 * u[3] - 1.0, 2.0 * u[4] - 1.0, 1e-8 + u[5], 0.5 * u[6], 0.9 * u[7]],
                ),
            ];
            for (spec, vals) in cases {
                let theta = theta_of(&spec, vals);
                let m = hat_moments(&spec, &theta, &traj(x_vals.clone())).unwrap();
                for &h in &m.h_hat {
                    prop_assert!(h >= spec.h_floor());
                }
            }
        }
    }
}
