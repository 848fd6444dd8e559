//! Experiment driver for the `dyadic` library: sample ingestion, builtin
//! test functions, experiments and report output.

pub mod experiments;
pub mod families;
pub mod input;
pub mod report;
