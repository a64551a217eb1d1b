//! Simulate, fit and score: one replication, many replications, and the
//! mean/sd aggregation used for benchmark tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::draws::PosteriorDraws;
use crate::error::Result;
use crate::metrics::{
    estimation_errors, posterior_mean_probability, predict_mean, prediction_error, selection_metrics,
    MetricsReport, SelectionScope,
};
use crate::model::{Dataset, Family, Hyperparameters, SamplerConfig};
use crate::rng::RngStream;
use crate::simgen::{generate_with_rng, SimSpec, SimulatedData};
use crate::summary::select_with_scope;
use crate::{gaussian, logistic};

/// Runs the sampler matching the dataset's family.
pub fn fit(data: &Dataset, config: &SamplerConfig, hyper: &Hyperparameters) -> Result<PosteriorDraws> {
    let mut rng = RngStream::new(config.seed);
    fit_with_rng(data, config, hyper, &mut rng)
}

pub fn fit_with_rng(
    data: &Dataset,
    config: &SamplerConfig,
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<PosteriorDraws> {
    match data.family() {
        Family::Gaussian => gaussian::run_chain_with_rng(data, config, hyper, rng),
        Family::Binomial => logistic::run_chain_logistic_with_rng(data, config, hyper, rng),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: SimSpec,
    pub sampler: SamplerConfig,
    pub hyper: Hyperparameters,
    /// Credible level used for selection.
    pub level: f64,
    pub scope: SelectionScope,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spec: SimSpec::default(),
            sampler: SamplerConfig::default(),
            hyper: Hyperparameters::default(),
            level: 0.95,
            scope: SelectionScope::MainEffects,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub rep: usize,
    pub n_missing: usize,
    pub metrics: MetricsReport,
}

/// `(simulation stream, chain stream)` for replication `rep` under `seed`.
pub fn replication_streams(seed: u64, rep: usize) -> (RngStream, RngStream) {
    let rep_stream = RngStream::new(seed).substream(rep as u64);
    (rep_stream.substream(0), rep_stream.substream(1))
}

pub fn simulate(cfg: &ExperimentConfig, rep: usize) -> Result<SimulatedData> {
    let (sim_rng, _) = replication_streams(cfg.spec.seed, rep);
    generate_with_rng(&cfg.spec, &sim_rng)
}

/// Scores a fitted chain against the simulation it came from.
pub fn score(draws: &PosteriorDraws, sim: &SimulatedData, level: f64, scope: SelectionScope) -> Result<MetricsReport> {
    let estimate = draws.mean_coefficients();
    let (est_beta, est_theta) = estimation_errors(&estimate, &sim.truth)?;
    let predicted = match sim.test.family() {
        Family::Gaussian => predict_mean(&estimate, &sim.test)?,
        Family::Binomial => posterior_mean_probability(draws, &sim.test)?,
    };
    let pred = prediction_error(&predicted, &sim.test)?;
    let selected = select_with_scope(draws, level, scope)?;
    let support = match scope {
        SelectionScope::MainEffects => sim.truth.support(),
        SelectionScope::AllCoefficients => sim.truth.full_support(),
    };
    let counts = selection_metrics(&selected, &support)?;
    Ok(MetricsReport::new(est_beta, est_theta, pred, counts))
}

/// Fits and scores an already simulated dataset for replication `rep`.
pub fn run_on(cfg: &ExperimentConfig, sim: &SimulatedData, rep: usize) -> Result<(PosteriorDraws, ReplicationResult)> {
    let (_, mut chain_rng) = replication_streams(cfg.spec.seed, rep);
    let draws = fit_with_rng(&sim.train, &cfg.sampler, &cfg.hyper, &mut chain_rng)?;
    let metrics = score(&draws, sim, cfg.level, cfg.scope)?;
    let result = ReplicationResult {
        rep,
        n_missing: sim.train.n_missing(),
        metrics,
    };
    Ok((draws, result))
}

pub fn run_replication(cfg: &ExperimentConfig, rep: usize) -> Result<ReplicationResult> {
    let sim = simulate(cfg, rep)?;
    Ok(run_on(cfg, &sim, rep)?.1)
}

/// Replications `0..reps` in parallel on the current rayon pool; results
/// come back in replication order.
pub fn run_replications(cfg: &ExperimentConfig, reps: usize) -> Result<Vec<ReplicationResult>> {
    (0..reps).into_par_iter().map(|rep| run_replication(cfg, rep)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub mean: f64,
    /// Population standard deviation (divisor = number of replications).
    pub sd: f64,
    pub median: f64,
}

pub const METRIC_NAMES: [&str; 6] = ["est_beta", "est_theta", "pred", "accuracy", "fdr", "fpr"];

pub fn metric_value(m: &MetricsReport, name: &str) -> Option<f64> {
    Some(match name {
        "est_beta" => m.est_beta,
        "est_theta" => m.est_theta,
        "pred" => m.pred,
        "accuracy" => m.accuracy,
        "fdr" => m.fdr,
        "fpr" => m.fpr,
        _ => return None,
    })
}

pub fn summarize_values(metric: &str, values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    MetricSummary {
        metric: metric.to_string(),
        mean,
        sd,
        median: crate::summary::quantile_sorted(&sorted, 0.5),
    }
}

pub fn aggregate(results: &[ReplicationResult]) -> Vec<MetricSummary> {
    METRIC_NAMES
        .iter()
        .map(|name| {
            let values: Vec<f64> = results
                .iter()
                .map(|r| metric_value(&r.metrics, name).expect("known metric"))
                .collect();
            summarize_values(name, &values)
        })
        .collect()
}

/// Table formatting: two decimals below 10, three significant digits above.
pub fn format_table_value(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    if a < 10.0 {
        format!("{v:.2}")
    } else {
        let digits = a.log10().floor() as i32 + 1;
        let decimals = (3 - digits).max(0) as usize;
        format!("{v:.decimals$}")
    }
}

/// `"m (s)"`.
pub fn format_mean_sd(s: &MetricSummary) -> String {
    format!("{} ({})", format_table_value(s.mean), format_table_value(s.sd))
}
