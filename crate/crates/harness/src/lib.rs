//! Experiment harness: zero caching, density comparisons, sweeps and fits.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod report;
pub mod selftest;
pub mod sweep;

pub use error::HarnessError;
