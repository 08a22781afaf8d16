//! Command-line companion to `acsel-core`: TOML configuration, CSV data
//! exchange, JSON/CSV reports, and a threaded Monte Carlo driver.
//!
//! The binary (`acsel`) wires these modules to four subcommands —
//! `simulate`, `fit`, `select` and `mc`.  Everything here is deterministic:
//! a fixed config produces byte-identical outputs on every run.

pub mod config;
pub mod data;
pub mod driver;
pub mod error;
pub mod report;

pub use error::{CliError, Result};
