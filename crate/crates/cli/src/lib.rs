//! Library half of the `contact` command: config files, CSV and SVG output,
//! the self-check suite and parameter sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod checks;
pub mod config;
pub mod csv;
pub mod error;
pub mod svg;
pub mod sweep;

pub use app::run_cli;
pub use error::CliError;
