//! Command-line front end for the BLFQ pion VQE library: configuration,
//! experiment drivers and result files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::StateSource;
pub use config::{Mode, RunConfig};
pub use error::{CliError, Result};
