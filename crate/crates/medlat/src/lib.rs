//! Experiment harness for median lattice L2-approximation: budget sweeps
//! with exact errors, CSV and SVG output, and the `medlat` command line.
//!
//! The numerical work lives in [`medlat_core`]; this crate adds threads,
//! files and flags.

#![warn(missing_docs)]

pub mod cli;
mod error;
pub mod experiment;
pub mod records;
pub mod runner;
pub mod svg;

pub use error::{Error, Result};
pub use medlat_core;
