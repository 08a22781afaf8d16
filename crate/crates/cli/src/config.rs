//! TOML configuration: schema, strict parsing, and conversion to the core
//! library's types.
//!
//! Every section rejects unknown keys (typos are hard errors with the TOML
//! line attached), optional keys have documented defaults, and invariant
//! violations are reported with the assumption they break.

use acsel_core::{
    build_collection, CollectionMode, ExperimentConfig, FamilyGrid, FitOptions, InnovationLaw,
    ModelFamily, ModelSpec, ParamBox, ParamVector, PenaltyRule,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Default burn-in for simulation-backed subcommands.
const DEFAULT_BURN_IN: usize = 1000;

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

fn default_law() -> String {
    "gaussian".into()
}

fn default_mode() -> String {
    "hierarchical".into()
}

/// Parsed configuration file; sections are consumed per subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Model family, orders, active set and bounds (simulate/fit truth).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    /// Parameter values for the model's active coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSection>,
    /// Simulation length, burn-in, innovation law and seed.
    #[serde(default)]
    pub simulate: SimulateSection,
    /// Optimizer settings.
    #[serde(default)]
    pub fit: FitSection,
    /// Candidate collection for `select` and `mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection: Option<CollectionSection>,
    /// Penalty rule for `select`.
    #[serde(default)]
    pub selection: SelectionSection,
    /// Monte Carlo batch settings for `mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSection>,
}

/// `[model]` — one concrete model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// `ar`, `arch`, `garch`, `tarch` or `arma_garch`.
    pub family: String,
    /// Autoregressive order (`ar`, `garch`, `arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Shock order (`arch`, `garch`, `tarch`, `arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Variance-lag order of the GARCH part (`arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_p: Option<usize>,
    /// Shock order of the GARCH part (`arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_q: Option<usize>,
    /// Active coordinate indices; defaults to all coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
    /// Conditional-variance floor; defaults to the library's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_floor: Option<f64>,
    /// Optimization box; defaults to the family's documented box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
}

/// Explicit per-coordinate parameter box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Lower bounds, one per ambient coordinate.
    pub lower: Vec<f64>,
    /// Upper bounds, one per ambient coordinate.
    pub upper: Vec<f64>,
}

/// `[theta]` — parameter values in active-coordinate order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSection {
    /// One value per active coordinate of `[model]`.
    pub values: Vec<f64>,
}

/// `[simulate]` — trajectory generation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// Number of observations to keep (required by `simulate`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Warm-up steps discarded before the kept sample (default 1000).
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// `gaussian` (default), `student_t` (needs `nu`) or `rademacher`.
    #[serde(default = "default_law")]
    pub law: String,
    /// Degrees of freedom for `student_t` (must exceed 4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Simulation seed (default 0).
    #[serde(default)]
    pub seed: u64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            n: None,
            burn_in: DEFAULT_BURN_IN,
            law: default_law(),
            nu: None,
            seed: 0,
        }
    }
}

/// `[fit]` — optimizer settings; every key defaults to the library's.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// Simplex-diameter convergence threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_x: Option<f64>,
    /// Objective-spread convergence threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_f: Option<f64>,
    /// Evaluation budget per start and per model dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evals_per_dim: Option<usize>,
    /// Random interior starts beyond the deterministic one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_starts: Option<usize>,
    /// Seed for the random starts (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `[collection]` — a family grid enumerated into candidate models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionSection {
    /// Grid family: `ar`, `arch`, `garch`, `tarch` or `arma_garch`.
    pub family: String,
    /// Largest autoregressive order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_p: Option<usize>,
    /// Largest shock order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_q: Option<usize>,
    /// Largest GARCH-part variance-lag order (`arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_big_p: Option<usize>,
    /// Largest GARCH-part shock order (`arma_garch`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_big_q: Option<usize>,
    /// `hierarchical` (default) or `exhaustive`.
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Optimization box shared by all candidates; defaults per family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
}

/// `[selection]` — penalty for the `select` subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionSection {
    /// Penalty rule; defaults to BIC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyConfig>,
}

/// One penalty rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    /// `bic`, `aic`, `log_log_power`, `power_law` or `custom`.
    pub rule: String,
    /// Scale for `log_log_power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Exponent offset for `log_log_power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Exponent for `power_law`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `(n, kappa)` pairs for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(usize, f64)>>,
}

/// `[experiment]` — Monte Carlo batch settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Strictly increasing sample sizes.
    pub n_grid: Vec<usize>,
    /// Number of replications.
    pub replications: usize,
    /// Master seed for the whole batch (default 0).
    #[serde(default)]
    pub master_seed: u64,
    /// Penalty rules compared on the same fits, in order.
    pub penalties: Vec<PenaltyConfig>,
}

/// Parses and structurally validates a config file.
///
/// # Errors
///
/// [`CliError::Config`] with the TOML parser's line/column context for
/// malformed text or unknown keys.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn config_err<T>(msg: String) -> Result<T> {
    Err(CliError::Config(msg))
}

fn require<T: Copy>(value: Option<T>, family: &str, key: &str) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => config_err(format!("family `{family}` requires key `{key}`")),
    }
}

fn reject<T>(value: &Option<T>, family: &str, key: &str) -> Result<()> {
    if value.is_some() {
        return config_err(format!("key `{key}` does not apply to family `{family}`"));
    }
    Ok(())
}

fn parse_family(
    family: &str,
    p: Option<usize>,
    q: Option<usize>,
    big_p: Option<usize>,
    big_q: Option<usize>,
) -> Result<ModelFamily> {
    let built = match family {
        "ar" => {
            reject(&q, family, "q")?;
            reject(&big_p, family, "big_p")?;
            reject(&big_q, family, "big_q")?;
            ModelFamily::Ar { p: require(p, family, "p")? }
        }
        "arch" => {
            reject(&p, family, "p")?;
            reject(&big_p, family, "big_p")?;
            reject(&big_q, family, "big_q")?;
            ModelFamily::Arch { q: require(q, family, "q")? }
        }
        "garch" => {
            reject(&big_p, family, "big_p")?;
            reject(&big_q, family, "big_q")?;
            ModelFamily::Garch { p: require(p, family, "p")?, q: require(q, family, "q")? }
        }
        "tarch" => {
            reject(&p, family, "p")?;
            reject(&big_p, family, "big_p")?;
            reject(&big_q, family, "big_q")?;
            ModelFamily::Tarch { q: require(q, family, "q")? }
        }
        "arma_garch" => ModelFamily::ArmaGarch {
            p: require(p, family, "p")?,
            q: require(q, family, "q")?,
            big_p: require(big_p, family, "big_p")?,
            big_q: require(big_q, family, "big_q")?,
        },
        other => {
            return config_err(format!(
                "unknown family `{other}` (expected ar, arch, garch, tarch, arma_garch)"
            ))
        }
    };
    built.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(built)
}

/// Builds a box from an explicit section, enforcing the positivity of the
/// variance intercept's lower bound ("Assumption D": the conditional
/// variance is bounded below by a positive constant).
fn build_bounds(section: &BoundsSection, family: ModelFamily) -> Result<ParamBox> {
    let d = family.dim();
    if section.lower.len() != d || section.upper.len() != d {
        return config_err(format!(
            "bounds must list {d} values per side for {}, got {} lower / {} upper",
            family.label(),
            section.lower.len(),
            section.upper.len()
        ));
    }
    let vi = family.mandatory_index();
    if !(section.lower[vi] > 0.0) {
        return config_err(format!(
            "lower bound {} for `{}` violates Assumption D: the conditional variance must \
             stay above a positive constant, so this bound must be strictly positive",
            section.lower[vi],
            family.param_name(vi)
        ));
    }
    ParamBox::new(section.lower.clone(), section.upper.clone())
        .map_err(|e| CliError::Config(e.to_string()))
}

impl ModelSection {
    /// The family with orders applied.
    pub fn family(&self) -> Result<ModelFamily> {
        parse_family(&self.family, self.p, self.q, self.big_p, self.big_q)
    }

    /// The full model spec (family, active set, bounds, floor).
    pub fn build(&self) -> Result<ModelSpec> {
        let family = self.family()?;
        let bounds = match &self.bounds {
            Some(section) => build_bounds(section, family)?,
            None => family.default_box(),
        };
        let active = match &self.active {
            Some(list) => list.clone(),
            None => (0..family.dim()).collect(),
        };
        let spec = match self.h_floor {
            Some(floor) => ModelSpec::with_h_floor(family, active, bounds, floor),
            None => ModelSpec::new(family, active, bounds),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }
}

impl CollectionSection {
    fn grid(&self) -> Result<FamilyGrid> {
        let f = self.family.as_str();
        let grid = match f {
            "ar" => {
                reject(&self.max_q, f, "max_q")?;
                reject(&self.max_big_p, f, "max_big_p")?;
                reject(&self.max_big_q, f, "max_big_q")?;
                FamilyGrid::Ar { max_p: require(self.max_p, f, "max_p")? }
            }
            "arch" => {
                reject(&self.max_p, f, "max_p")?;
                reject(&self.max_big_p, f, "max_big_p")?;
                reject(&self.max_big_q, f, "max_big_q")?;
                FamilyGrid::Arch { max_q: require(self.max_q, f, "max_q")? }
            }
            "garch" => {
                reject(&self.max_big_p, f, "max_big_p")?;
                reject(&self.max_big_q, f, "max_big_q")?;
                FamilyGrid::Garch {
                    max_p: require(self.max_p, f, "max_p")?,
                    max_q: require(self.max_q, f, "max_q")?,
                }
            }
            "tarch" => {
                reject(&self.max_p, f, "max_p")?;
                reject(&self.max_big_p, f, "max_big_p")?;
                reject(&self.max_big_q, f, "max_big_q")?;
                FamilyGrid::Tarch { max_q: require(self.max_q, f, "max_q")? }
            }
            "arma_garch" => FamilyGrid::ArmaGarch {
                max_p: require(self.max_p, f, "max_p")?,
                max_q: require(self.max_q, f, "max_q")?,
                max_big_p: require(self.max_big_p, f, "max_big_p")?,
                max_big_q: require(self.max_big_q, f, "max_big_q")?,
            },
            other => {
                return config_err(format!(
                    "unknown family `{other}` (expected ar, arch, garch, tarch, arma_garch)"
                ))
            }
        };
        Ok(grid)
    }

    fn mode(&self) -> Result<CollectionMode> {
        match self.mode.as_str() {
            "hierarchical" => Ok(CollectionMode::Hierarchical),
            "exhaustive" => Ok(CollectionMode::Exhaustive),
            other => config_err(format!(
                "unknown collection mode `{other}` (expected hierarchical, exhaustive)"
            )),
        }
    }

    /// Enumerates the candidate collection.
    pub fn build(&self) -> Result<Vec<ModelSpec>> {
        let grid = self.grid()?;
        let bounds = match &self.bounds {
            Some(section) => build_bounds(section, grid.ambient())?,
            None => grid.ambient().default_box(),
        };
        build_collection(grid, self.mode()?, &bounds).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl PenaltyConfig {
    fn no_param(&self, field: &Option<f64>, key: &str) -> Result<()> {
        if field.is_some() {
            return config_err(format!("rule `{}` takes no parameter `{key}`", self.rule));
        }
        Ok(())
    }

    /// Converts to the core penalty rule, checking parameter applicability.
    pub fn build(&self) -> Result<PenaltyRule> {
        let reject_table = |cfg: &PenaltyConfig| -> Result<()> {
            if cfg.table.is_some() {
                return config_err(format!("rule `{}` takes no parameter `table`", cfg.rule));
            }
            Ok(())
        };
        match self.rule.as_str() {
            "bic" | "aic" => {
                self.no_param(&self.c, "c")?;
                self.no_param(&self.delta, "delta")?;
                self.no_param(&self.alpha, "alpha")?;
                reject_table(self)?;
                Ok(if self.rule == "bic" { PenaltyRule::Bic } else { PenaltyRule::Aic })
            }
            "log_log_power" => {
                self.no_param(&self.alpha, "alpha")?;
                reject_table(self)?;
                let c = self
                    .c
                    .ok_or_else(|| CliError::Config("rule `log_log_power` requires `c`".into()))?;
                let delta = self.delta.ok_or_else(|| {
                    CliError::Config("rule `log_log_power` requires `delta`".into())
                })?;
                Ok(PenaltyRule::LogLogPower { c, delta })
            }
            "power_law" => {
                self.no_param(&self.c, "c")?;
                self.no_param(&self.delta, "delta")?;
                reject_table(self)?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| CliError::Config("rule `power_law` requires `alpha`".into()))?;
                Ok(PenaltyRule::PowerLaw { alpha })
            }
            "custom" => {
                self.no_param(&self.c, "c")?;
                self.no_param(&self.delta, "delta")?;
                self.no_param(&self.alpha, "alpha")?;
                let table = self
                    .table
                    .clone()
                    .ok_or_else(|| CliError::Config("rule `custom` requires `table`".into()))?;
                Ok(PenaltyRule::Custom { table })
            }
            other => config_err(format!(
                "unknown penalty rule `{other}` (expected bic, aic, log_log_power, power_law, \
                 custom)"
            )),
        }
    }
}

impl RunConfig {
    fn model_section(&self) -> Result<&ModelSection> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a [model] section".into()))
    }

    /// The `[model]` spec.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        self.model_section()?.build()
    }

    /// The `[theta]` values embedded into the `[model]` spec.
    pub fn theta(&self, spec: &ModelSpec) -> Result<ParamVector> {
        let section = self
            .theta
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a [theta] section".into()))?;
        ParamVector::embed(spec, &section.values).map_err(|e| {
            CliError::Config(format!(
                "[theta] values do not fit the model's active set: {e}"
            ))
        })
    }

    /// The innovation law from `[simulate]`.
    pub fn law(&self) -> Result<InnovationLaw> {
        let section = &self.simulate;
        let law = match section.law.as_str() {
            "gaussian" => {
                if section.nu.is_some() {
                    return config_err("`nu` only applies to the student_t law".into());
                }
                InnovationLaw::Gaussian
            }
            "student_t" => {
                let nu = section.nu.ok_or_else(|| {
                    CliError::Config("law `student_t` requires `nu` (> 4)".into())
                })?;
                InnovationLaw::StudentT { nu }
            }
            "rademacher" => {
                if section.nu.is_some() {
                    return config_err("`nu` only applies to the student_t law".into());
                }
                InnovationLaw::Rademacher
            }
            other => {
                return config_err(format!(
                    "unknown innovation law `{other}` (expected gaussian, student_t, rademacher)"
                ))
            }
        };
        law.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(law)
    }

    /// Optimizer options from `[fit]`, defaulting field-by-field.
    pub fn fit_options(&self) -> Result<FitOptions> {
        let defaults = FitOptions::default();
        let opts = FitOptions {
            tol_x: self.fit.tol_x.unwrap_or(defaults.tol_x),
            tol_f: self.fit.tol_f.unwrap_or(defaults.tol_f),
            max_evals_per_dim: self.fit.max_evals_per_dim.unwrap_or(defaults.max_evals_per_dim),
            random_starts: self.fit.random_starts.unwrap_or(defaults.random_starts),
            seed: self.fit.seed.unwrap_or(defaults.seed),
        };
        opts.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(opts)
    }

    /// The candidate collection from `[collection]`.
    pub fn collection(&self) -> Result<Vec<ModelSpec>> {
        self.collection
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a [collection] section".into()))?
            .build()
    }

    /// The `select` penalty (`[selection].penalty`, default BIC).
    pub fn penalty(&self) -> Result<PenaltyRule> {
        match &self.selection.penalty {
            Some(cfg) => cfg.build(),
            None => Ok(PenaltyRule::Bic),
        }
    }

    /// Assembles the full Monte Carlo experiment for `mc`.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let section = self
            .experiment
            .as_ref()
            .ok_or_else(|| CliError::Config("the mc subcommand needs an [experiment] section".into()))?;
        let truth_spec = self.model_spec()?;
        let collection = self.collection()?;
        if let Some(first) = collection.first() {
            if first.family() != truth_spec.family() {
                return config_err(format!(
                    "the [model] truth must be declared in the collection's ambient family \
                     {} — use the ambient orders and pick the submodel with `active` — got {}",
                    first.family().label(),
                    truth_spec.family().label()
                ));
            }
        }
        let theta_star = self.theta(&truth_spec)?;
        let penalties = section
            .penalties
            .iter()
            .map(PenaltyConfig::build)
            .collect::<Result<Vec<_>>>()?;
        let cfg = ExperimentConfig {
            truth_spec,
            theta_star,
            collection,
            penalties,
            n_grid: section.n_grid.clone(),
            replications: section.replications,
            law: self.law()?,
            burn_in: self.simulate.burn_in,
            master_seed: section.master_seed,
            fit: self.fit_options()?,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulate_config_fills_documented_defaults() {
        let cfg = parse_config(
            "[model]\nfamily = \"ar\"\np = 1\n\n[theta]\nvalues = [0.5, 1.0]\n\n[simulate]\nn = 100\n",
        )
        .unwrap();
        assert_eq!(cfg.simulate.burn_in, 1000);
        assert_eq!(cfg.simulate.law, "gaussian");
        assert_eq!(cfg.simulate.seed, 0);
        assert_eq!(cfg.law().unwrap(), InnovationLaw::Gaussian);
        let spec = cfg.model_spec().unwrap();
        assert_eq!(spec.active(), &[0, 1]);
        assert_eq!(cfg.fit_options().unwrap(), FitOptions::default());
        assert_eq!(cfg.penalty().unwrap(), PenaltyRule::Bic);
    }

    #[test]
    fn unknown_keys_are_errors_naming_the_key() {
        let err = parse_config("[selection]\npenlaty = { rule = \"bic\" }\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("penlaty"), "message should name the key: {msg}");
        assert!(matches!(err, CliError::Config(_)));
        // The TOML parser reports where the offending key sits.
        assert!(msg.contains("line 2"), "message should carry the line: {msg}");
    }

    #[test]
    fn penalty_order_is_preserved() {
        let cfg = parse_config(
            "[experiment]\nn_grid = [100, 200]\nreplications = 2\npenalties = [ { rule = \
             \"aic\" }, { rule = \"bic\" } ]\n",
        )
        .unwrap();
        let rules: Vec<_> = cfg
            .experiment
            .as_ref()
            .unwrap()
            .penalties
            .iter()
            .map(|p| p.build().unwrap())
            .collect();
        assert_eq!(rules, vec![PenaltyRule::Aic, PenaltyRule::Bic]);
    }

    #[test]
    fn nonpositive_variance_lower_bound_names_assumption_d() {
        let cfg = parse_config(
            "[model]\nfamily = \"garch\"\np = 1\nq = 1\n\n[model.bounds]\nlower = [0.0, 0.0, \
             0.0]\nupper = [10.0, 0.9, 0.9]\n",
        )
        .unwrap();
        let err = cfg.model_spec().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Assumption D"), "got: {msg}");
        assert!(msg.contains("omega"), "should name the coordinate: {msg}");
        assert_eq!(err.code(), 2);
    }

    #[test]
    fn family_order_keys_are_cross_checked() {
        let cfg =
            parse_config("[model]\nfamily = \"ar\"\np = 1\nq = 2\n").unwrap();
        let msg = cfg.model_spec().unwrap_err().to_string();
        assert!(msg.contains("`q` does not apply"), "got: {msg}");

        let cfg = parse_config("[model]\nfamily = \"garch\"\np = 1\n").unwrap();
        let msg = cfg.model_spec().unwrap_err().to_string();
        assert!(msg.contains("requires key `q`"), "got: {msg}");

        let cfg = parse_config("[model]\nfamily = \"garsh\"\np = 1\n").unwrap();
        let msg = cfg.model_spec().unwrap_err().to_string();
        assert!(msg.contains("unknown family `garsh`"), "got: {msg}");
    }

    #[test]
    fn penalty_parameters_are_cross_checked() {
        let p = PenaltyConfig {
            rule: "bic".into(),
            c: Some(1.0),
            delta: None,
            alpha: None,
            table: None,
        };
        assert!(p.build().unwrap_err().to_string().contains("takes no parameter `c`"));

        let p = PenaltyConfig {
            rule: "log_log_power".into(),
            c: Some(1.0),
            delta: None,
            alpha: None,
            table: None,
        };
        assert!(p.build().unwrap_err().to_string().contains("requires `delta`"));

        let cfg = parse_config(
            "[selection]\npenalty = { rule = \"custom\", table = [[500, 3.5], [1000, 4.0]] }\n",
        )
        .unwrap();
        assert_eq!(
            cfg.penalty().unwrap(),
            PenaltyRule::Custom { table: vec![(500, 3.5), (1000, 4.0)] }
        );
    }

    #[test]
    fn student_t_law_requires_heavy_tail_parameter() {
        let cfg = parse_config("[simulate]\nlaw = \"student_t\"\n").unwrap();
        assert!(cfg.law().unwrap_err().to_string().contains("requires `nu`"));

        let cfg = parse_config("[simulate]\nlaw = \"student_t\"\nnu = 3.0\n").unwrap();
        assert!(matches!(cfg.law(), Err(CliError::Config(_))));

        let cfg = parse_config("[simulate]\nlaw = \"gaussian\"\nnu = 6.0\n").unwrap();
        assert!(cfg.law().unwrap_err().to_string().contains("student_t"));
    }

    #[test]
    fn config_round_trips_through_serialization() {
        let text = "[model]\nfamily = \"garch\"\np = 2\nq = 1\nactive = [0, 1, 3]\n\n[theta]\n\
             values = [0.1, 0.2, 0.5]\n\n[simulate]\nn = 500\nburn_in = 800\nlaw = \
             \"student_t\"\nnu = 8.0\nseed = 42\n\n[fit]\ntol_x = 1e-7\n\n[collection]\nfamily = \
             \"garch\"\nmax_p = 2\nmax_q = 2\n\n[experiment]\nn_grid = [500, 1000]\nreplications \
             = 10\nmaster_seed = 7\npenalties = [ { rule = \"bic\" } ]\n";
        let parsed = parse_config(text).unwrap();
        let rendered = toml::to_string(&parsed).expect("serializable");
        let reparsed = parse_config(&rendered).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn experiment_truth_must_live_in_the_collections_ambient_family() {
        let cfg = parse_config(
            "[model]\nfamily = \"ar\"\np = 1\n\n[theta]\nvalues = [0.6, 1.0]\n\n[collection]\n\
             family = \"ar\"\nmax_p = 2\n\n[experiment]\nn_grid = [100, 200]\nreplications = \
             2\npenalties = [ { rule = \"bic\" } ]\n",
        )
        .unwrap();
        let msg = cfg.experiment().unwrap_err().to_string();
        assert!(msg.contains("ambient family AR(2)"), "got: {msg}");
        assert!(msg.contains("`active`"), "got: {msg}");

        // The same truth declared through the ambient family works.
        let cfg = parse_config(
            "[model]\nfamily = \"ar\"\np = 2\nactive = [0, 2]\n\n[theta]\nvalues = [0.6, \
             1.0]\n\n[collection]\nfamily = \"ar\"\nmax_p = 2\n\n[experiment]\nn_grid = [100, \
             200]\nreplications = 2\npenalties = [ { rule = \"bic\" } ]\n",
        )
        .unwrap();
        let experiment = cfg.experiment().unwrap();
        assert_eq!(experiment.truth_index(), Some(1));
    }

    #[test]
    fn collection_section_builds_grids() {
        let cfg = parse_config("[collection]\nfamily = \"garch\"\nmax_p = 1\nmax_q = 1\n").unwrap();
        let specs = cfg.collection().unwrap();
        assert_eq!(specs.len(), 3);

        let cfg = parse_config(
            "[collection]\nfamily = \"ar\"\nmax_p = 2\nmode = \"exhaustive\"\n",
        )
        .unwrap();
        assert_eq!(cfg.collection().unwrap().len(), 4);

        let cfg = parse_config("[collection]\nfamily = \"ar\"\nmax_p = 2\nmode = \"both\"\n")
            .unwrap();
        assert!(cfg.collection().unwrap_err().to_string().contains("unknown collection mode"));
    }
}
