use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = adindex_cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(adindex_cli::EXIT_USAGE as u8);
    }
    let outcome = adindex_cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
