use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use zerosphere::cli::{configure_threads, run, EXIT_ERROR};

/// Zero-sphere scans, layer-potential checks and shape recovery from a JSON job file.
#[derive(Parser)]
#[command(name = "zerosphere", version)]
struct Args {
    /// Job configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the job's `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the summary line.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(run(&args.config, args.out.as_deref(), args.quiet) as u8)
}
