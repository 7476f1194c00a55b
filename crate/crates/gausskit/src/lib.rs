//! Command-line front end for `gausskit-core`: target parsing, pipeline
//! dispatch, JSON run reports and CSV tables.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::CliError;
pub use formats::emit_curve_csv;
pub use report::{Coefficient, Method, RunReport};

use args::Cli;
use commands::Output;

/// Run with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `argv`, run the command, print the report to `out`.
///
/// Exit codes: 0 on success, 1 on usage errors, 2 when the computation or
/// writing the outputs fails. Error messages go to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let start = Instant::now();
    let result = commands::execute(cli.command).and_then(|o| {
        match o {
            Output::Report(mut r) => {
                if cli.timing {
                    r.wall_time_ms = Some(start.elapsed().as_millis() as u64);
                }
                out.write_all(r.to_json().as_bytes())?;
            }
            Output::Text(t) => out.write_all(&t)?,
        }
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
