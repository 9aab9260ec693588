//! Command-line front end for `infharm2d-core`: run configuration, grid
//! evaluation on a thread pool, file formats and the verification suite.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod formats;
pub mod verify;

pub use config::{Expectation, NegativeSpec, RunConfig};
pub use error::CliError;
