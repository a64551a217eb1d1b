//! Desk-scale reproduction cases for the standard simulation designs.
//!
//! Each case runs a fixed simulation design for a number of replications
//! and checks aggregate means against bands derived from reference
//! `mean (sd)` values: `[mean - 3 sd, mean + 3 sd]`, clipped at zero, unless
//! a case pins tighter bounds.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::{aggregate, run_replications, ExperimentConfig, MetricSummary};
use crate::model::{Family, SamplerConfig};
use crate::simgen::{SimSpec, Setting};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub metric: String,
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub fn new(metric: &str, lower: f64, upper: f64) -> Self {
        Self {
            metric: metric.to_string(),
            lower,
            upper,
        }
    }

    /// `[mean - 3 sd, mean + 3 sd]`, clipped at zero.
    pub fn from_reference(metric: &str, mean: f64, sd: f64) -> Self {
        Self::new(metric, (mean - 3.0 * sd).max(0.0), mean + 3.0 * sd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproCase {
    pub name: String,
    /// Short description of the simulation design.
    pub design: String,
    pub experiment: ExperimentConfig,
    pub reps: usize,
    pub bands: Vec<Band>,
}

fn case(name: &str, design: &str, spec: SimSpec, reps: usize, bands: Vec<Band>) -> ReproCase {
    ReproCase {
        name: name.to_string(),
        design: design.to_string(),
        experiment: ExperimentConfig {
            spec,
            sampler: SamplerConfig::default(),
            ..Default::default()
        },
        reps,
        bands,
    }
}

/// One case per simulation design, 20 replications each.
pub fn standard_cases() -> Vec<ReproCase> {
    let reps = 20;
    vec![
        case(
            "SettingI-n200",
            "gaussian, setting I",
            SimSpec { seed: 2001, ..Default::default() },
            reps,
            vec![
                Band::new("est_beta", 0.02, 0.12),
                Band::from_reference("est_theta", 0.22, 0.07),
                Band::from_reference("pred", 1.24, 0.23),
            ],
        ),
        case(
            "SettingIII-n200",
            "gaussian, setting III",
            SimSpec { setting: Setting::III, seed: 3001, ..Default::default() },
            reps,
            vec![Band::from_reference("est_beta", 0.08, 0.05)],
        ),
        case(
            "SettingVI-n500",
            "gaussian, setting VI",
            SimSpec { setting: Setting::VI, n: 500, seed: 4001, ..Default::default() },
            reps,
            vec![Band::new("est_beta", 0.05, 1.0)],
        ),
        case(
            "HighDim-n100-p120",
            "gaussian, p > n",
            SimSpec { n: 100, p: 120, seed: 5001, ..Default::default() },
            reps,
            vec![Band::from_reference("est_beta", 0.25, 0.98)],
        ),
        case(
            "Missing-30pct",
            "gaussian, 30% missing y",
            SimSpec { missing_fraction: 0.3, seed: 6001, ..Default::default() },
            reps,
            vec![Band::new("est_beta", 0.01, 0.11)],
        ),
        case(
            "NoInteraction-n500",
            "gaussian, no interactions",
            SimSpec { n: 500, rho_x: 0.0, interactions: false, seed: 7001, ..Default::default() },
            reps,
            vec![Band::from_reference("est_beta", 0.02, 0.01)],
        ),
        case(
            "Logistic-SettingI-n200",
            "logistic, setting I",
            SimSpec { family: Family::Binomial, seed: 8001, ..Default::default() },
            reps,
            vec![Band::from_reference("est_beta", 1.35, 1.31)],
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub metric: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub name: String,
    pub design: String,
    pub reps: usize,
    pub aggregates: Vec<MetricSummary>,
    pub checks: Vec<BandCheck>,
}

impl CaseOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproReport {
    pub cases: Vec<CaseOutcome>,
}

impl ReproReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(CaseOutcome::pass)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Reproduction report\n\n");
        out.push_str("| case | design | reps | metric | mean | band | result |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for case in &self.cases {
            for c in &case.checks {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {:.4} | [{:.4}, {:.4}] | {} |\n",
                    case.name,
                    case.design,
                    case.reps,
                    c.metric,
                    c.value,
                    c.lower,
                    c.upper,
                    if c.pass { "PASS" } else { "FAIL" }
                ));
            }
        }
        let passed = self.cases.iter().filter(|c| c.pass()).count();
        out.push_str(&format!("\n{passed}/{} cases passed\n", self.cases.len()));
        out
    }
}

pub fn run_case(case: &ReproCase) -> Result<CaseOutcome> {
    let results = run_replications(&case.experiment, case.reps)?;
    let aggregates = aggregate(&results);
    let checks = case
        .bands
        .iter()
        .map(|band| {
            let value = aggregates
                .iter()
                .find(|a| a.metric == band.metric)
                .map(|a| a.mean)
                .unwrap_or(f64::NAN);
            BandCheck {
                metric: band.metric.clone(),
                value,
                lower: band.lower,
                upper: band.upper,
                pass: value >= band.lower && value <= band.upper,
            }
        })
        .collect();
    Ok(CaseOutcome {
        name: case.name.clone(),
        design: case.design.clone(),
        reps: case.reps,
        aggregates,
        checks,
    })
}

/// Cases run one after another; replications inside a case run in parallel.
pub fn run_repro_suite(cases: &[ReproCase]) -> Result<ReproReport> {
    Ok(ReproReport {
        cases: cases.iter().map(run_case).collect::<Result<_>>()?,
    })
}
