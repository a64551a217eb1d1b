//! Scores against simulation truth: squared estimation errors, test-set
//! prediction error and main-effect selection rates.

use serde::{Deserialize, Serialize};

use crate::draws::PosteriorDraws;
use crate::error::{Error, Result};
use crate::model::{Coefficients, Dataset, Family};
use crate::simgen::SimTruth;

/// Which coefficients the selection counts cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScope {
    /// The p main effects.
    #[default]
    MainEffects,
    /// All p(1+q) predictor coefficients, `(beta_j, theta_j)` per predictor.
    AllCoefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SelectionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl SelectionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// FP / (TP + FP), zero when nothing is selected.
    pub fn fdr(&self) -> f64 {
        ratio(self.fp, self.tp + self.fp)
    }

    pub fn fpr(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub est_beta: f64,
    pub est_theta: f64,
    pub pred: f64,
    pub accuracy: f64,
    pub fdr: f64,
    pub fpr: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl MetricsReport {
    pub fn new(est_beta: f64, est_theta: f64, pred: f64, counts: SelectionCounts) -> Self {
        Self {
            est_beta,
            est_theta,
            pred,
            accuracy: counts.accuracy(),
            fdr: counts.fdr(),
            fpr: counts.fpr(),
            tp: counts.tp,
            fp: counts.fp,
            fn_: counts.fn_,
            tn: counts.tn,
        }
    }
}

/// `(|beta_hat - beta|^2, |Theta_hat - Theta|_F^2)`.
pub fn estimation_errors(estimate: &Coefficients, truth: &SimTruth) -> Result<(f64, f64)> {
    let t = &truth.coefficients;
    if estimate.p() != t.p() || estimate.q() != t.q() {
        return Err(Error::Shape(format!(
            "estimate is p={}, q={} but truth is p={}, q={}",
            estimate.p(),
            estimate.q(),
            t.p(),
            t.q()
        )));
    }
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    Ok((sq(&estimate.beta, &t.beta), sq(&estimate.theta, &t.theta)))
}

/// Gaussian: mean squared error of `predicted` against the test response.
/// Binomial: `predicted` are probabilities; misclassification rate at 0.5.
pub fn prediction_error(predicted: &[f64], test: &Dataset) -> Result<f64> {
    if predicted.len() != test.n() {
        return Err(Error::Shape(format!(
            "{} predictions for {} test rows",
            predicted.len(),
            test.n()
        )));
    }
    let n = test.n() as f64;
    Ok(match test.family() {
        Family::Gaussian => {
            predicted
                .iter()
                .zip(test.y())
                .map(|(yh, y)| (y - yh).powi(2))
                .sum::<f64>()
                / n
        }
        Family::Binomial => {
            predicted
                .iter()
                .zip(test.y())
                .filter(|(prob, y)| (**prob > 0.5) != (**y == 1.0))
                .count() as f64
                / n
        }
    })
}

/// Plug-in prediction `eta(estimate)` on the test design.
pub fn predict_mean(estimate: &Coefficients, test: &Dataset) -> Result<Vec<f64>> {
    estimate.predict(test.x(), test.z())
}

/// Posterior-mean success probability, averaged over the stored draws.
pub fn posterior_mean_probability(draws: &PosteriorDraws, test: &Dataset) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; test.n()];
    for s in 0..draws.n_stored {
        let eta = draws.draw(s).predict(test.x(), test.z())?;
        for (a, e) in acc.iter_mut().zip(eta) {
            *a += 1.0 / (1.0 + (-e).exp());
        }
    }
    let ns = draws.n_stored as f64;
    acc.iter_mut().for_each(|a| *a /= ns);
    Ok(acc)
}

pub fn selection_metrics(selected: &[bool], truth_support: &[bool]) -> Result<SelectionCounts> {
    if selected.len() != truth_support.len() {
        return Err(Error::Shape(format!(
            "{} selection flags for {} truth flags",
            selected.len(),
            truth_support.len()
        )));
    }
    let mut c = SelectionCounts::default();
    for (&s, &t) in selected.iter().zip(truth_support) {
        match (s, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}
