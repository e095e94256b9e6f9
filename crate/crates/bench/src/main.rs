use std::process::ExitCode;

use clap::Parser;
use contrel_bench::{run_experiment, ExperimentConfig};

fn main() -> ExitCode {
    let config = ExperimentConfig::parse();
    match run_experiment(&config) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if let Some(s) = report.summary {
                println!("max_abs_error = {}", s.max_abs_error);
                println!("fraction_within_bound = {}", s.fraction_within_bound);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
