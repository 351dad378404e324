//! The `reclab` command-line front end.
//!
//! Thin dispatch over the solver library: every subcommand loads its inputs,
//! calls into `reclab-core`, prints a short human summary plus a JSON
//! document, and maps outcomes to exit codes (0 success, 2 precondition
//! error, 3 horizon exhausted). Output is byte-identical across runs for
//! identical inputs and seeds.

mod cli;
pub mod commands;
mod config;
pub mod fmt;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::sync::Once;

use clap::Parser;

pub use commands::{CliError, EXIT_HORIZON, EXIT_OK, EXIT_PRECONDITION};

static THREAD_POOL: Once = Once::new();

/// Builds the global worker pool once, honoring RECLAB_THREADS when set.
fn init_thread_pool() {
    THREAD_POOL.call_once(|| {
        if let Some(threads) = std::env::var("RECLAB_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            // Ignore failure: a pool may already exist in test harnesses.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    });
}

/// Parses `argv`, runs the subcommand, and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    run_cli_to(argv, &mut stdout)
}

/// Like [`run_cli`] but with an explicit output sink, so output can be
/// captured byte-for-byte.
pub fn run_cli_to<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let parsed = match cli::Cli::try_parse_from(argv) {
        Ok(parsed) => parsed,
        Err(err) => {
            // --help and --version arrive here as non-error displays.
            let code = if err.use_stderr() {
                EXIT_PRECONDITION
            } else {
                EXIT_OK
            };
            let _ = err.print();
            return code;
        }
    };
    match commands::dispatch(parsed.command, out) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.code()
        }
    }
}
