use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use weave_cli::{exit, run, Cli};

/// `WEAVE_THREADS` sets the worker count; unset or 0 lets rayon decide.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("WEAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("WEAVE_THREADS must be a non-negative integer, got '{v}'"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("weave: {e}");
        return ExitCode::from(exit::USAGE as u8);
    }
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("weave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
