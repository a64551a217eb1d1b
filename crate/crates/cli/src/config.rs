//! Run configuration: an optional TOML file overlaid by command-line flags.
//! File keys mirror the `SimSpec`, `SamplerConfig` and `Hyperparameters`
//! field names.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use hsp_core::experiment::ExperimentConfig;
use hsp_core::metrics::SelectionScope;
use hsp_core::simgen::{Setting, SimSpec};
use hsp_core::{Family, Hyperparameters, SamplerConfig, SweepOrder};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "hsp", version, about = "Bayesian pliable lasso with a horseshoe prior")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to X, Z and y CSV files.
    Fit(Opts),
    /// Simulate one dataset, fit it and score the fit against the truth.
    Simulate(Opts),
    /// Repeat simulate over replications and aggregate the metrics.
    Benchmark(Opts),
    /// Run the reproduction cases and write a markdown report.
    Repro(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// TOML file with default settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Predictor matrix (fit).
    #[arg(short = 'x', long)]
    pub x: Option<PathBuf>,
    /// Modifier matrix (fit); omit for no modifiers.
    #[arg(short = 'z', long)]
    pub z: Option<PathBuf>,
    /// Response column, NA for missing (fit).
    #[arg(short = 'y', long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, action = clap::ArgAction::Set)]
    pub pliable: Option<bool>,
    #[arg(long)]
    pub sweep: Option<SweepArg>,
    /// Credible level used for selection.
    #[arg(long)]
    pub level: Option<f64>,
    /// Count selection over every predictor coefficient, not only main effects.
    #[arg(long)]
    pub all_coefficients: bool,
    /// Centre and scale X and Z before fitting; draws are mapped back.
    #[arg(long)]
    pub standardize: bool,
    /// Write every stored draw to draws.csv.
    #[arg(long)]
    pub store_draws: bool,
    #[arg(long)]
    pub sigma0_sq: Option<f64>,
    #[arg(long)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub b0: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub setting: Option<Setting>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub missing: Option<f64>,
    #[arg(long)]
    pub no_interactions: bool,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// Only run reproduction cases with these names (repro).
    #[arg(long = "case")]
    pub cases: Vec<String>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepArg {
    Ascending,
    Descending,
}

impl From<SweepArg> for SweepOrder {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Ascending => SweepOrder::Ascending,
            SweepArg::Descending => SweepOrder::Descending,
        }
    }
}

/// Keys accepted in the configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub x: Option<PathBuf>,
    pub z: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub family: Option<Family>,
    pub n_iter: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub seed: Option<u64>,
    pub pliable: Option<bool>,
    pub sweep: Option<SweepArg>,
    pub level: Option<f64>,
    pub scope: Option<SelectionScope>,
    pub standardize: Option<bool>,
    pub store_draws: Option<bool>,
    pub sigma0_sq: Option<f64>,
    pub a0: Option<f64>,
    pub b0: Option<f64>,
    pub reps: Option<usize>,
    pub setting: Option<Setting>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub n_test: Option<usize>,
    pub rho_x: Option<f64>,
    pub missing_fraction: Option<f64>,
    pub interactions: Option<bool>,
    pub noise_sd: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub x: PathBuf,
    pub z: Option<PathBuf>,
    pub y: PathBuf,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Option<Inputs>,
    pub family: Family,
    pub sampler: SamplerConfig,
    pub hyper: Hyperparameters,
    pub level: f64,
    pub scope: SelectionScope,
    pub standardize: bool,
    pub store_draws: bool,
    pub spec: SimSpec,
    pub reps: usize,
    /// Replication count given in the flags or file, if any.
    pub reps_explicit: Option<usize>,
    pub cases: Vec<String>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn resolve(opts: &Opts) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let sd = SamplerConfig::default();
        let hd = Hyperparameters::default();
        let family = opts.family.or(file.family).unwrap_or_default();
        let sampler = SamplerConfig {
            n_iter: opts.iters.or(file.n_iter).unwrap_or(sd.n_iter),
            burn_in: opts.burnin.or(file.burn_in).unwrap_or(sd.burn_in),
            thin: opts.thin.or(file.thin).unwrap_or(sd.thin),
            seed: opts.seed.or(file.seed).unwrap_or(sd.seed),
            pliable: opts.pliable.or(file.pliable).unwrap_or(sd.pliable),
            sweep: opts.sweep.or(file.sweep).map(Into::into).unwrap_or(sd.sweep),
            store_imputations: true,
        };
        let hyper = Hyperparameters {
            sigma0_sq: opts.sigma0_sq.or(file.sigma0_sq).unwrap_or(hd.sigma0_sq),
            a0: opts.a0.or(file.a0).unwrap_or(hd.a0),
            b0: opts.b0.or(file.b0).unwrap_or(hd.b0),
        };
        let spd = SimSpec::default();
        let spec = SimSpec {
            setting: opts.setting.or(file.setting).unwrap_or(spd.setting),
            n: opts.n.or(file.n).unwrap_or(spd.n),
            p: opts.p.or(file.p).unwrap_or(spd.p),
            q: opts.q.or(file.q).unwrap_or(spd.q),
            rho_x: opts.rho.or(file.rho_x).unwrap_or(spd.rho_x),
            missing_fraction: opts.missing.or(file.missing_fraction).unwrap_or(spd.missing_fraction),
            interactions: if opts.no_interactions {
                false
            } else {
                file.interactions.unwrap_or(spd.interactions)
            },
            family,
            n_test: opts.n_test.or(file.n_test).unwrap_or(spd.n_test),
            seed: sampler.seed,
            noise_sd: opts.noise_sd.or(file.noise_sd).unwrap_or(spd.noise_sd),
        };
        let level = opts.level.or(file.level).unwrap_or(0.95);
        if !(level > 0.0 && level < 1.0) {
            return Err(CliError::Config(format!("level must lie in (0, 1), got {level}")));
        }
        let reps_explicit = opts.reps.or(file.reps);
        let reps = reps_explicit.unwrap_or(1);
        if reps == 0 {
            return Err(CliError::Config("reps must be at least 1".into()));
        }
        let scope = if opts.all_coefficients {
            SelectionScope::AllCoefficients
        } else {
            file.scope.unwrap_or_default()
        };
        let x = opts.x.clone().or(file.x);
        let y = opts.y.clone().or(file.y);
        let inputs = match (x, y) {
            (Some(x), Some(y)) => Some(Inputs {
                x,
                z: opts.z.clone().or(file.z),
                y,
            }),
            (None, None) => None,
            _ => return Err(CliError::Config("both -x and -y are required to fit".into())),
        };
        let formats = if !opts.format.is_empty() {
            opts.format.clone()
        } else {
            file.formats.unwrap_or_else(|| vec![Format::Csv])
        };
        sampler.validate()?;
        hyper.validate()?;
        spec.validate()?;
        Ok(Self {
            inputs,
            family,
            sampler,
            hyper,
            level,
            scope,
            standardize: opts.standardize || file.standardize.unwrap_or(false),
            store_draws: opts.store_draws || file.store_draws.unwrap_or(false),
            spec,
            reps,
            reps_explicit,
            cases: opts.cases.clone(),
            out: opts.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("hsp-out")),
            formats,
        })
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            spec: self.spec.clone(),
            sampler: self.sampler.clone(),
            hyper: self.hyper,
            level: self.level,
            scope: self.scope,
        }
    }
}
