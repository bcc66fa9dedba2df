//! Command-line front end: argument parsing, run configuration, result
//! records and plot data.

use std::ffi::OsString;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod plot;
pub mod record;

pub use args::Cli;
pub use commands::{execute, persist, Outcome};
pub use config::RunConfig;
pub use plot::export_plot_data;
pub use record::{read_records, ResultRecord, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config {path}: {detail}")]
    Config { path: String, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: recur_core::Error,
    },
}

impl CliError {
    /// 1 for bad input, 2 for a computation that ran but did not check out.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core {
                source: recur_core::Error::InvalidArgument(_),
                ..
            } => 1,
            CliError::Core { .. } => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand, appends the
/// record and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|outcome| persist(&outcome).map(|files| (outcome, files)));
    match result {
        Ok((outcome, files)) => {
            eprintln!("{}: {}", outcome.record.command, outcome.summary);
            eprintln!("record appended to {}", outcome.output.display());
            for f in files {
                eprintln!("plot data written to {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
