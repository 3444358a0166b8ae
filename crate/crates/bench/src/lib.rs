//! Experiment harness for the `proxvr` solvers: configure a problem and a
//! set of solvers, run them over many seeds, and write CSV traces and an
//! SVG plot of median suboptimality against effective passes.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod tune;

pub use config::{ExperimentConfig, PlanMode, ProblemSpec, SolverId};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, summarize, ExperimentResult, Summary};
pub use report::{emit_csv, emit_svg};
