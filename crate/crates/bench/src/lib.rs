//! Experiment harness for the continual-release mechanisms: configuration,
//! stream inputs, Monte Carlo trials and CSV output.

pub mod config;
pub mod experiment;
pub mod input;
pub mod tables;
pub mod trace;

pub use config::{ExperimentConfig, Mechanism, Mode, StreamKind, Task};
pub use experiment::{run_experiment, summarize, Prepared, Report, Summary, TrialOutput};
pub use tables::bounds_table;
pub use trace::{emit_csv, parse_trace, ErrorTrace, TraceRow};
