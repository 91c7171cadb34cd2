//! Library side of the `nrh` command line: configuration, verification
//! suites, and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use commands::CliError;
pub use config::RunConfig;
pub use report::{FailureDump, SuiteReport};
