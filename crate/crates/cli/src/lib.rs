//! File formats, run configuration and command dispatch for the `stablecut`
//! binary.

pub mod config;
pub mod format;
pub mod run;

pub use config::{Algorithm, Command, Family, Heuristic, OutputFormat, RunConfig};
pub use run::{run, CliError, Outcome};
