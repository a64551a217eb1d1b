//! Command-line front end: CSV ingestion, run configuration and the `fit`,
//! `simulate`, `benchmark` and `repro` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod output;

use config::{Cli, Command, RunConfig};
use error::Result;

pub fn run(cli: &Cli) -> Result<()> {
    let (opts, cmd): (_, fn(&RunConfig) -> Result<()>) = match &cli.command {
        Command::Fit(o) => (o, commands::cmd_fit),
        Command::Simulate(o) => (o, commands::cmd_simulate),
        Command::Benchmark(o) => (o, commands::cmd_benchmark),
        Command::Repro(o) => (o, commands::cmd_repro),
    };
    let cfg = RunConfig::resolve(opts)?;
    cmd(&cfg)
}
