//! Command-line front end: file formats, the coverage harness and command
//! dispatch.

pub mod commands;
pub mod coverage;
pub mod error;
pub mod io;

pub use error::{CliError, Result};
