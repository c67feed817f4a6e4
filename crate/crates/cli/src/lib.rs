//! Command-line front end for the `sparselda` library.
//!
//! [`run`] executes one [`RunConfig`]; the binary only adds argument
//! parsing, logging and exit codes.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod format;
pub mod run;

pub use config::RunConfig;
pub use error::CliError;
pub use run::{run, Summary};
