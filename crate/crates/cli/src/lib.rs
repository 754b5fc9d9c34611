//! Command-line front end for `ncrealize`.
//!
//! Exit codes: 0 success or pass, 1 mathematical failure (a witness or a
//! failed certificate was written), 2 usage, input or numerical error.

mod args;
mod commands;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: String, msg: String },
    Core(ncrealize::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io { path, msg } => write!(f, "{path}: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ncrealize::Error> for CliError {
    fn from(e: ncrealize::Error) -> Self {
        CliError::Core(e)
    }
}

/// Whether a command certified its property.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("NCREALIZE_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("NCREALIZE_THREADS='{v}' is not a thread count"))),
        _ => Ok(None),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let threads = match thread_count(cli.global.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: usage error: thread count must be positive");
            return EXIT_ERROR;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_ERROR;
        }
    };
    match pool.install(|| commands::dispatch(&cli)) {
        Ok(Outcome::Success) => EXIT_OK,
        Ok(Outcome::Failure) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
