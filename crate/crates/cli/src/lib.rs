//! Library side of the `vsys` command: configuration, CSV and SVG output,
//! and the four subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod svg;

pub use config::{Overrides, Preset, RunConfig};
pub use error::{CliError, CliResult};
