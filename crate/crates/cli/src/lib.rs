//! Command-line front end: argument parsing, config files, dispatch and
//! versioned JSON/CSV/text output.
//!
//! Exit codes: 0 success, 1 failed verification or other error, 2 usage or
//! input error (including malformed CSV), 3 numeric-domain error.

pub mod args;
pub mod checks;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::{Map, Value};
use thiserror::Error;

use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] diamond_forests::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use diamond_forests::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Convergence { .. } => 3,
                E::Parse(_)
                | E::UnboundSymbol(_)
                | E::UnknownSymbol(_)
                | E::InvalidLabel(_)
                | E::UnsupportedLabel(_)
                | E::InvalidArgument(_)
                | E::GridMismatch(_)
                | E::Io(_)
                | E::Csv(_) => 2,
                E::InsufficientSamples(_) | E::Json(_) => 1,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn dispatch(cmd: &Command) -> Result<output::Report> {
    match cmd {
        Command::Expand(a) => commands::expand(a),
        Command::Levy(a) => commands::levy(a),
        Command::CameronMartin(a) => commands::cameron_martin(a),
        Command::Bessel(a) => commands::bessel(a),
        Command::Chaos2(a) => commands::chaos2(a),
        Command::Signature(a) => commands::signature(a),
        Command::Riccati(a) => commands::riccati(a),
        Command::Mc(a) => commands::mc(a),
        Command::Verify(a) => checks::verify(a),
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let (argv, config_path) = match config::merge_config(argv) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };

    let report = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };

    let mut config = Map::new();
    config.insert("args".into(), cli.command.config_json());
    config.insert(
        "config_file".into(),
        config_path.map(Value::String).unwrap_or(Value::Null),
    );
    config.insert("output".into(), serde_json::to_value(cli.output).expect("enum"));
    let doc = output::envelope(cli.command.name(), Value::Object(config), report.result);
    if let Err(e) = output::render(cli.output, &doc, report.table.as_ref(), out) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    if report.passed {
        0
    } else {
        1
    }
}
