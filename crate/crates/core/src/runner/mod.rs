//! Experiment harness: configuration, dispatch, output and the CLI.
//!
//! ```no_run
//! use rsp::runner::{run, Command, ExperimentConfig};
//!
//! let mut cfg = ExperimentConfig::new(Command::Equatorial, 7);
//! cfg.params.samples = Some(1000);
//! let report = run(&cfg).unwrap();
//! print!("{}", String::from_utf8(report.rendered).unwrap());
//! ```

mod cli;
mod config;
mod experiments;
mod output;

use std::time::{Duration, Instant};

pub use cli::{cli_main, Cli};
pub use config::{parse_angle, parse_config_text, Command, ExperimentConfig, Params, KEYS};
pub use experiments::{emit_curve, run_experiment, weyl_guess, CurveKind};
pub use output::{write_atomic, Format, Table, Value, SCHEMA_VERSION};

use crate::error::{Error, Result};

/// Exit statuses of the CLI.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const GUARD: i32 = 3;
    pub const IO: i32 = 4;
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Guard(_) => exit::GUARD,
        Error::Io(_) => exit::IO,
        _ => exit::CONFIG,
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub table: Table,
    /// The table in the configured format, exactly as written.
    pub rendered: Vec<u8>,
    /// Not part of any output, so replays stay byte-identical.
    pub wall_time: Duration,
}

/// Runs one experiment and, if an output path is set, writes its table
/// atomically.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let table = run_experiment(config)?;
    let rendered = table.render(config.format)?;
    if let Some(path) = &config.out {
        write_atomic(path, &rendered)?;
    }
    Ok(RunReport {
        config: config.clone(),
        table,
        rendered,
        wall_time: start.elapsed(),
    })
}
