//! Posterior summaries: means, equal-tailed intervals, interval-based
//! selection and autocorrelation.
//!
//! Quantiles interpolate linearly between order statistics (Hyndman-Fan
//! type 7): for sorted draws `x_0..x_{n-1}` the `u`-quantile sits at
//! position `h = (n - 1) u`.

use serde::{Deserialize, Serialize};

use crate::draws::{Param, PosteriorDraws};
use crate::error::{Error, Result};
use crate::metrics::SelectionScope;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl CredibleInterval {
    pub fn excludes_zero(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }

    pub fn contains(&self, other: &CredibleInterval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("credible level must lie in (0, 1), got {level}")))
    }
}

fn require_chain(draws: &PosteriorDraws, param: Param) -> Result<&[f64]> {
    draws
        .chain(param)
        .ok_or_else(|| Error::Domain(format!("parameter {param} is not in these draws")))
}

pub fn mean(chain: &[f64]) -> f64 {
    chain.iter().sum::<f64>() / chain.len() as f64
}

pub fn std_dev(chain: &[f64]) -> f64 {
    let m = mean(chain);
    let n = chain.len();
    if n < 2 {
        return 0.0;
    }
    (chain.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Type-7 quantile of already sorted values.
pub fn quantile_sorted(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * u;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn interval_of(chain: &[f64], level: f64) -> Result<CredibleInterval> {
    check_level(level)?;
    if chain.is_empty() {
        return Err(Error::Domain("empty chain".into()));
    }
    let mut sorted = chain.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(CredibleInterval {
        lower: quantile_sorted(&sorted, tail),
        upper: quantile_sorted(&sorted, 1.0 - tail),
        level,
    })
}

pub fn posterior_mean(draws: &PosteriorDraws, param: Param) -> Result<f64> {
    Ok(mean(require_chain(draws, param)?))
}

pub fn credible_interval(draws: &PosteriorDraws, param: Param, level: f64) -> Result<CredibleInterval> {
    interval_of(require_chain(draws, param)?, level)
}

fn is_degenerate(chain: &[f64]) -> bool {
    chain.windows(2).all(|w| w[0] == w[1])
}

/// Whether a chain's level-interval excludes zero. Constant chains are
/// never selected.
pub fn interval_selects(chain: &[f64], level: f64) -> Result<bool> {
    if is_degenerate(chain) {
        check_level(level)?;
        return Ok(false);
    }
    Ok(interval_of(chain, level)?.excludes_zero())
}

/// Main effect `j` is selected iff its level-interval for `beta_j`
/// excludes zero.
pub fn select_variables(draws: &PosteriorDraws, level: f64) -> Result<Vec<bool>> {
    check_level(level)?;
    (0..draws.p)
        .map(|j| interval_selects(require_chain(draws, Param::Beta(j))?, level))
        .collect()
}

/// Selection flags under a scope; `AllCoefficients` lays them out as
/// `(beta_j, theta_j1, .., theta_jq)` per predictor.
pub fn select_with_scope(draws: &PosteriorDraws, level: f64, scope: SelectionScope) -> Result<Vec<bool>> {
    match scope {
        SelectionScope::MainEffects => select_variables(draws, level),
        SelectionScope::AllCoefficients => {
            check_level(level)?;
            let mut out = Vec::with_capacity(draws.p * (1 + draws.q));
            for j in 0..draws.p {
                out.push(interval_selects(require_chain(draws, Param::Beta(j))?, level)?);
                for k in 0..draws.q {
                    out.push(interval_selects(require_chain(draws, Param::Theta(j, k))?, level)?);
                }
            }
            Ok(out)
        }
    }
}

/// Sample autocorrelation, or a marker for a chain with zero variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Acf {
    Values(Vec<f64>),
    Degenerate,
}

impl Acf {
    pub fn values(&self) -> Option<&[f64]> {
        match self {
            Acf::Values(v) => Some(v),
            Acf::Degenerate => None,
        }
    }
}

/// Lags `0..=max_lag` (capped at `len - 1`), normalised so lag 0 is 1.
pub fn autocorrelation_of(chain: &[f64], max_lag: usize) -> Acf {
    let n = chain.len();
    if n < 2 {
        return Acf::Degenerate;
    }
    let m = mean(chain);
    let centred: Vec<f64> = chain.iter().map(|v| v - m).collect();
    let c0: f64 = centred.iter().map(|v| v * v).sum();
    if c0 <= 0.0 || c0.is_nan() {
        return Acf::Degenerate;
    }
    let max_lag = max_lag.min(n - 1);
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for k in 1..=max_lag {
        let ck: f64 = centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum();
        out.push(ck / c0);
    }
    Acf::Values(out)
}

pub fn autocorrelation(draws: &PosteriorDraws, param: Param, max_lag: usize) -> Result<Acf> {
    Ok(autocorrelation_of(require_chain(draws, param)?, max_lag))
}

/// One row of a posterior summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub param: Param,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub ci95: CredibleInterval,
    pub ci90: CredibleInterval,
}

pub fn summarize(draws: &PosteriorDraws, params: &[Param]) -> Result<Vec<ParamSummary>> {
    params
        .iter()
        .map(|&param| {
            let chain = require_chain(draws, param)?;
            let mut sorted = chain.to_vec();
            sorted.sort_by(f64::total_cmp);
            Ok(ParamSummary {
                param,
                mean: mean(chain),
                sd: std_dev(chain),
                median: quantile_sorted(&sorted, 0.5),
                ci95: interval_of(chain, 0.95)?,
                ci90: interval_of(chain, 0.90)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means() {
        assert_eq!(mean(&[4.0; 10]), 4.0);
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
    }

    #[test]
    fn interval_on_one_to_hundred() {
        let chain: Vec<f64> = (1..=100).map(f64::from).collect();
        let ci = interval_of(&chain, 0.95).unwrap();
        assert!((ci.lower - 3.475).abs() < 1e-12);
        assert!((ci.upper - 97.525).abs() < 1e-12);
    }

    #[test]
    fn symmetric_interval_brackets_zero() {
        let chain: Vec<f64> = (-50..=50).map(f64::from).collect();
        let ci = interval_of(&chain, 0.95).unwrap();
        assert!(ci.lower < 0.0 && ci.upper > 0.0);
        assert!(!interval_selects(&chain, 0.95).unwrap());
    }

    #[test]
    fn positive_chain_selected_constant_not() {
        let chain: Vec<f64> = (1..=200).map(|v| f64::from(v) * 0.01).collect();
        assert!(interval_selects(&chain, 0.95).unwrap());
        assert!(!interval_selects(&[3.0; 50], 0.95).unwrap());
    }

    #[test]
    fn bad_levels() {
        assert!(interval_of(&[1.0, 2.0], 1.0).is_err());
        assert!(interval_of(&[1.0, 2.0], 0.0).is_err());
        assert!(interval_selects(&[1.0, 1.0], 1.5).is_err());
    }

    #[test]
    fn acf_degenerate_and_lag_zero() {
        assert_eq!(autocorrelation_of(&[2.0; 30], 5), Acf::Degenerate);
        let chain: Vec<f64> = (0..50).map(|v| (v as f64).sin()).collect();
        let acf = autocorrelation_of(&chain, 10);
        assert_eq!(acf.values().unwrap()[0], 1.0);
        assert_eq!(acf.values().unwrap().len(), 11);
    }
}
