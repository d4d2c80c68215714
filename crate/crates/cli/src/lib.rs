//! Sweeps, figure presets, slope fitting and tabular output on top of
//! `crsnoma-core`.

pub mod config;
mod error;
pub mod output;
pub mod presets;
pub mod slope;
pub mod sweep;

pub use error::CliError;
