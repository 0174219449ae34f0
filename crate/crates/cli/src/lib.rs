//! Batch driver around the `dualwell` solver: JSON configuration in, CSV,
//! JSON, text and SVG artifacts out.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod report;
pub mod run;
pub mod table;

pub use error::CliError;
