//! Command-line front end for `logflat`: parses TOML descriptions of bases,
//! monoids and pairings, runs the computations and reports the results.

pub mod config;
pub mod report;
pub mod run;

pub use run::{run, Cli};
