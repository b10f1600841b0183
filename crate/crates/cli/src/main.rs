use std::process::ExitCode;

use clap::Parser;
use copolarity_cli::{run, RunConfig, EXIT_INPUT};

fn init_threads() {
    let Ok(raw) = std::env::var("COPOLARITY_LAB_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // Only fails if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("ignoring COPOLARITY_LAB_THREADS={raw:?}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    init_threads();
    match run(&config) {
        Ok((report, code)) => {
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} (residual {:e}, tolerance {:e})", c.name, c.residual, c.tolerance);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
