use std::process::ExitCode;

use clap::Parser;
use hardylt_cli::config::PROFILE_ENV;
use hardylt_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var(PROFILE_ENV).ok();
    let report = match run(&cli, env.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hardylt: {e}");
            if let CliError::Core(hardylt_core::Error::Convergence { dump, .. }) = &e {
                for (a, b, c) in dump.iter().take(20) {
                    eprintln!("  {a:e} {b:e} {c:e}");
                }
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = report.to_json();
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("hardylt: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("hardylt: verification failed");
        ExitCode::from(1)
    }
}
