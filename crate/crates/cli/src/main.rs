//! `acsel` — simulate, fit and select affine causal time-series models.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acsel_cli::config::{parse_config, RunConfig};
use acsel_cli::error::{CliError, Result};
use acsel_cli::{data, driver, report};
use acsel_core::{fit, select, simulate};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "acsel",
    about = "Penalized quasi-likelihood model selection for affine causal time series",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trajectory and write it as `series.csv`.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the configured model to a CSV series; writes `fit.json`.
    Fit {
        #[command(flatten)]
        common: Common,
        /// One-column CSV of observations.
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
    },
    /// Fit a candidate collection and pick the penalized winner; writes
    /// `selection.json`.
    Select {
        #[command(flatten)]
        common: Common,
        /// One-column CSV of observations.
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
    },
    /// Run the configured Monte Carlo experiment; writes `mc_report.json`
    /// and CSV summaries.
    Mc {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

fn cmd_simulate(common: &Common) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let spec = cfg.model_spec()?;
    let theta = cfg.theta(&spec)?;
    let law = cfg.law()?;
    let n = cfg
        .simulate
        .n
        .ok_or_else(|| CliError::Config("the simulate subcommand needs [simulate] n".into()))?;
    let x = simulate(&spec, &theta, n, cfg.simulate.burn_in, law, cfg.simulate.seed)
        .map_err(CliError::from_run)?;
    prepare_out(&common.out)?;
    data::write_csv(&common.out.join("series.csv"), &x)
}

fn cmd_fit(common: &Common, data_path: &Path) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let spec = cfg.model_spec()?;
    let options = cfg.fit_options()?;
    let x = data::ingest_csv(data_path)?;
    let result = fit(&spec, &x, &options).map_err(CliError::from_run)?;
    prepare_out(&common.out)?;
    let doc = report::FitReport {
        model: spec.label(),
        spec: &spec,
        n: x.len(),
        options: &options,
        result: &result,
    };
    report::write_json(&common.out.join("fit.json"), &doc)
}

fn cmd_select(common: &Common, data_path: &Path) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let collection = cfg.collection()?;
    let penalty = cfg.penalty()?;
    let options = cfg.fit_options()?;
    let x = data::ingest_csv(data_path)?;
    let chosen = select(&collection, &x, &penalty, &options).map_err(CliError::from_run)?;
    prepare_out(&common.out)?;
    report::write_selection(&common.out.join("selection.json"), &chosen)
}

fn cmd_mc(common: &Common) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let experiment = cfg.experiment()?;
    let rep = driver::run_mc(&experiment)?;
    prepare_out(&common.out)?;
    report::write_mc_outputs(&common.out, &rep)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate { common } => cmd_simulate(common),
        Command::Fit { common, data } => cmd_fit(common, data),
        Command::Select { common, data } => cmd_select(common, data),
        Command::Mc { common } => cmd_mc(common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
