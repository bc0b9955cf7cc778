//! Command-line front end: argument handling, dispatch and output.
//!
//! Exit codes: 0 when every check passes, 1 on a mathematical mismatch,
//! 2 on a usage error. All output is assembled after the computation
//! finishes, so repeated runs are byte-identical apart from wall times.

pub mod args;
pub mod selftest;
pub mod table;
pub mod verify;

use std::ffi::OsString;

use adindex_core::qfunctions::set_qbinomial_fault;
use adindex_core::{Error, IdentityReport};
use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command, Fault};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ADINDEX_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Sizes the global thread pool from `ADINDEX_THREADS`, if set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// One report per line in compact JSON with sorted keys, so that parsing
/// and re-serializing a line reproduces it exactly.
pub fn report_json(report: &IdentityReport) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    serde_json::to_string(&value).expect("value serializes")
}

fn render_reports(reports: &[IdentityReport], json: bool) -> String {
    let mut out = String::new();
    for r in reports {
        if json {
            out.push_str(&report_json(r));
        } else {
            out.push_str(&r.to_string());
        }
        out.push('\n');
    }
    out
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Usage(_)
            | Error::Domain(_)
            | Error::TruncationOverflow(_)
            | Error::TruncationMismatch { .. }
            | Error::MissingSupportBound { .. }
    )
}

fn finish_reports(reports: Vec<IdentityReport>, json: bool) -> Outcome {
    let code = if reports.iter().all(|r| r.passed()) { EXIT_PASS } else { EXIT_FAIL };
    Outcome { code, stdout: render_reports(&reports, json), stderr: String::new() }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let fault = cli.inject_fault == Some(Fault::Qbinomial);
    if fault {
        set_qbinomial_fault(true);
    }
    let outcome = dispatch(cli.command);
    if fault {
        set_qbinomial_fault(false);
    }
    outcome
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Verify(args) => {
            let seed = args.seed.unwrap_or_else(rand::random);
            match verify::verify(&args, seed) {
                Ok(report) => finish_reports(vec![report], args.json),
                Err(e) if is_usage(&e) => Outcome::usage(e),
                Err(e) => {
                    let mut report = IdentityReport::new(args.identity.name()).with_seed(seed);
                    report.record_failure(e.to_string());
                    finish_reports(vec![report], args.json)
                }
            }
        }
        Command::Table(args) => match table::table(&args) {
            Ok(text) => match &args.output {
                Some(path) => match std::fs::write(path, text) {
                    Ok(()) => Outcome { code: EXIT_PASS, stdout: String::new(), stderr: String::new() },
                    Err(e) => Outcome::usage(format!("cannot write {}: {e}", path.display())),
                },
                None => Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() },
            },
            Err(e) if is_usage(&e) => Outcome::usage(e),
            Err(e) => Outcome { code: EXIT_FAIL, stdout: String::new(), stderr: format!("error: {e}\n") },
        },
        Command::Bench(args) => match table::bench(&args) {
            Ok(rows) => Outcome { code: EXIT_PASS, stdout: table::render_bench(&rows, args.json), stderr: String::new() },
            Err(e) if is_usage(&e) => Outcome::usage(e),
            Err(e) => Outcome { code: EXIT_FAIL, stdout: String::new(), stderr: format!("error: {e}\n") },
        },
        Command::Selftest(args) => finish_reports(selftest::selftest(), args.json),
    }
}
