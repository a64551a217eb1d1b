use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use hsp_cli::config::Cli;
use hsp_cli::error::exit_code;

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("HSP_THREADS") else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("HSP_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit_code::CONFIG as u8);
    }
    match hsp_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {:#}", anyhow::Error::new(e));
            ExitCode::from(code as u8)
        }
    }
}
