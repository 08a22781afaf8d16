//! Trajectory simulation with burn-in and reproducible seeding.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::math;
use crate::moments::Stepper;
use crate::spec::{ModelSpec, ParamVector};
use crate::stationarity::check_theta_r;
use crate::Result;

/// Distribution of the innovations, always centered with unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "snake_case"))]
pub enum InnovationLaw {
    /// Standard normal.
    Gaussian,
    /// Student-t with `nu` degrees of freedom, rescaled by `sqrt((nu-2)/nu)`
    /// to unit variance.  Requires `nu > 4` so that moments beyond the
    /// fourth exist.
    StudentT {
        /// Degrees of freedom.
        nu: f64,
    },
    /// Uniform on `{-1, +1}`.
    Rademacher,
}

impl InnovationLaw {
    /// Validates the law's own parameters.
    ///
    /// # Errors
    ///
    /// [`Error::MomentUndefined`] for a Student-t with `nu <= 4` or a
    /// non-finite `nu`.
    pub fn validate(&self) -> Result<()> {
        if let InnovationLaw::StudentT { nu } = *self {
            if !nu.is_finite() || nu <= 4.0 {
                return Err(Error::MomentUndefined {
                    reason: format!("Student-t innovations require nu > 4, got {nu}"),
                });
            }
        }
        Ok(())
    }

    /// The `r`-th absolute moment norm `||xi||_r = (E|xi|^r)^(1/r)`.
    ///
    /// Closed forms: for the standard normal
    /// `E|xi|^r = 2^(r/2) Gamma((r+1)/2) / sqrt(pi)`; for the standardized
    /// Student-t
    /// `E|xi|^r = (nu-2)^(r/2) Gamma((r+1)/2) Gamma((nu-r)/2) / (sqrt(pi) Gamma(nu/2))`,
    /// finite only for `r < nu`; for Rademacher the norm is exactly 1.
    ///
    /// # Errors
    ///
    /// [`Error::MomentUndefined`] for `r <= 0`, an invalid law, or a
    /// Student-t moment order `r >= nu`.
    pub fn norm_r(&self, r: f64) -> Result<f64> {
        self.validate()?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::MomentUndefined {
                reason: format!("moment order must be positive and finite, got {r}"),
            });
        }
        let half_ln_pi = 0.5 * math::ln(core::f64::consts::PI);
        Ok(match *self {
            InnovationLaw::Gaussian => {
                let ln_moment =
                    0.5 * r * math::ln(2.0) + math::ln_gamma(0.5 * (r + 1.0)) - half_ln_pi;
                math::exp(ln_moment / r)
            }
            InnovationLaw::StudentT { nu } => {
                if r >= nu {
                    return Err(Error::MomentUndefined {
                        reason: format!(
                            "Student-t with nu = {nu} has no finite moment of order {r}"
                        ),
                    });
                }
                let ln_moment = 0.5 * r * math::ln(nu - 2.0)
                    + math::ln_gamma(0.5 * (r + 1.0))
                    + math::ln_gamma(0.5 * (nu - r))
                    - half_ln_pi
                    - math::ln_gamma(0.5 * nu);
                math::exp(ln_moment / r)
            }
            InnovationLaw::Rademacher => 1.0,
        })
    }

    /// Draws one innovation.
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationLaw::Gaussian => rng.sample(rand_distr::StandardNormal),
            InnovationLaw::StudentT { nu } => {
                let t: f64 = rng.sample(
                    rand_distr::StudentT::new(nu).expect("validated degrees of freedom"),
                );
                t * math::sqrt((nu - 2.0) / nu)
            }
            InnovationLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Provenance recorded alongside a simulated series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryMeta {
    /// Generating model, when known.
    pub spec: Option<ModelSpec>,
    /// Generating parameter, when known.
    pub theta: Option<ParamVector>,
    /// Innovation law used.
    pub law: Option<InnovationLaw>,
    /// RNG seed the recursion was run with.
    pub seed: u64,
    /// Number of warm-up steps discarded before the retained values.
    pub burn_in: usize,
}

/// An observed or simulated series `X_1..X_n`, with optional provenance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    values: Vec<f64>,
    meta: Option<TrajectoryMeta>,
}

impl Trajectory {
    /// Wraps observed values; every entry must be finite.
    ///
    /// # Errors
    ///
    /// [`Error::NonFinite`] with the 0-based index of the first offending
    /// value.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Trajectory { values, meta: None })
    }

    /// Attaches provenance metadata.
    #[must_use]
    pub fn with_meta(mut self, meta: TrajectoryMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    /// The observations.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Provenance, when the series was produced by [`simulate`].
    pub fn meta(&self) -> Option<&TrajectoryMeta> {
        self.meta.as_ref()
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the series is empty.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `n` observations as a new series (provenance preserved:
    /// a prefix of a simulated run is the same run stopped earlier).
    ///
    /// # Errors
    ///
    /// [`Error::SeriesTooShort`] when fewer than `n` observations exist.
    pub fn prefix(&self, n: usize) -> Result<Trajectory> {
        if self.values.len() < n {
            return Err(Error::SeriesTooShort { n: self.values.len(), min: n });
        }
        Ok(Trajectory { values: self.values[..n].to_vec(), meta: self.meta.clone() })
    }
}

/// Derives an independent child seed from a master seed and a stream index.
///
/// Uses an integer mixing function (golden-ratio increment followed by a
/// 64-bit finalizer), so the mapping is identical on every platform and
/// distinct streams give well-separated generator states.
#[must_use]
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates `n` observations of `(spec, theta)` after `burn_in` warm-up
/// steps, starting the recursion from an all-zero past.
///
/// The parameter must lie in the second-order stationarity region (checked
/// with `||xi||_2 = 1`, exact for every supported law); use
/// [`simulate_unchecked`] to bypass the gate deliberately.  Identical inputs
/// produce bit-identical output on every platform.
///
/// # Errors
///
/// [`Error::Nonstationary`] when the gate fails, [`Error::SeriesTooShort`]
/// for `n = 0`, [`Error::SimulationDiverged`] if the recursion leaves the
/// representable range, plus any spec/parameter/law validation error.
pub fn simulate(
    spec: &ModelSpec,
    theta: &ParamVector,
    n: usize,
    burn_in: usize,
    law: InnovationLaw,
    seed: u64,
) -> Result<Trajectory> {
    let check = check_theta_r(spec, theta, 1.0)?;
    if !check.in_theta_r {
        return Err(Error::Nonstationary { margin: check.margin });
    }
    simulate_unchecked(spec, theta, n, burn_in, law, seed)
}

/// [`simulate`] without the stationarity gate, for deliberately exploring
/// boundary or explosive dynamics.  All other validation still applies.
///
/// # Errors
///
/// As [`simulate`], except [`Error::Nonstationary`] is never returned.
pub fn simulate_unchecked(
    spec: &ModelSpec,
    theta: &ParamVector,
    n: usize,
    burn_in: usize,
    law: InnovationLaw,
    seed: u64,
) -> Result<Trajectory> {
    law.validate()?;
    if n == 0 {
        return Err(Error::SeriesTooShort { n: 0, min: 1 });
    }
    let mut stepper = Stepper::new(spec, theta)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let total = burn_in
        .checked_add(n)
        .ok_or(Error::InvalidSpec { reason: format!("burn_in + n overflows: {burn_in} + {n}") })?;
    let mut values = Vec::with_capacity(n);
    for t in 0..total {
        let (f, h) = stepper.moments();
        let x = f + math::sqrt(h) * law.sample(&mut rng);
        if !x.is_finite() {
            // 1-based step count, burn-in included, so the report pinpoints
            // how far the recursion ran before leaving the finite range.
            return Err(Error::SimulationDiverged { step: t + 1 });
        }
        stepper.push(x);
        if t >= burn_in {
            values.push(x);
        }
    }
    Ok(Trajectory { values, meta: None }.with_meta(TrajectoryMeta {
        spec: Some(spec.clone()),
        theta: Some(theta.clone()),
        law: Some(law),
        seed,
        burn_in,
    }))
}
