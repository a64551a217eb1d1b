//! Data, hyperparameters, parameter states and the pliable linear predictor
//!
//! `eta_i = beta0 + z_i' theta0 + sum_j x_ij (beta_j + z_i' theta_j)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    Gaussian,
    Binomial,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "binomial" | "logistic" => Ok(Family::Binomial),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// Predictors `X` (n x p), modifiers `Z` (n x q) and a response with an
/// optional missingness mask. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    z: DMatrix<f64>,
    y: Vec<f64>,
    missing: Vec<bool>,
    family: Family,
    // Row-major copy of Z; the kernels walk it row by row.
    z_rows: Vec<f64>,
}

impl Dataset {
    pub fn new(
        x: DMatrix<f64>,
        z: DMatrix<f64>,
        y: Vec<f64>,
        missing: Vec<bool>,
        family: Family,
    ) -> Result<Self> {
        let n = x.nrows();
        if n == 0 || x.ncols() == 0 {
            return Err(Error::InvalidDataset("need n >= 1 and p >= 1".into()));
        }
        if z.nrows() != n || y.len() != n || missing.len() != n {
            return Err(Error::Shape(format!(
                "X has {n} rows but Z has {}, y has {}, mask has {}",
                z.nrows(),
                y.len(),
                missing.len()
            )));
        }
        if x.iter().chain(z.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("X and Z must be finite".into()));
        }
        for (i, (&yi, &m)) in y.iter().zip(&missing).enumerate() {
            if m {
                continue;
            }
            if !yi.is_finite() {
                return Err(Error::InvalidDataset(format!("y[{i}] is not finite")));
            }
            if family == Family::Binomial && yi != 0.0 && yi != 1.0 {
                return Err(Error::InvalidDataset(format!(
                    "binomial response must be 0/1, y[{i}] = {yi}"
                )));
            }
        }
        if family == Family::Binomial && missing.iter().any(|&m| m) {
            return Err(Error::Unsupported(
                "missing responses are only supported for the gaussian family".into(),
            ));
        }
        let q = z.ncols();
        let mut z_rows = vec![0.0; n * q];
        for i in 0..n {
            for k in 0..q {
                z_rows[i * q + k] = z[(i, k)];
            }
        }
        Ok(Self {
            x,
            z,
            y,
            missing,
            family,
            z_rows,
        })
    }

    /// Fully observed dataset.
    pub fn observed(x: DMatrix<f64>, z: DMatrix<f64>, y: Vec<f64>, family: Family) -> Result<Self> {
        let n = y.len();
        Self::new(x, z, y, vec![false; n], family)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.z.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn missing(&self) -> &[bool] {
        &self.missing
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n_missing(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.missing[i]).collect()
    }

    /// Column `j` of X as a contiguous slice.
    pub fn x_col(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    /// Row `i` of Z as a contiguous slice.
    pub fn z_row(&self, i: usize) -> &[f64] {
        let q = self.q();
        &self.z_rows[i * q..(i + 1) * q]
    }

    /// Same data with a different response and mask.
    pub fn with_response(&self, y: Vec<f64>, missing: Vec<bool>) -> Result<Self> {
        Self::new(self.x.clone(), self.z.clone(), y, missing, self.family)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Prior variance of beta0 and each entry of theta0.
    pub sigma0_sq: f64,
    /// Inverse-gamma prior on the noise variance.
    pub a0: f64,
    pub b0: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            sigma0_sq: 1.0,
            a0: 1e-2,
            b0: 1e-2,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma0_sq", self.sigma0_sq), ("a0", self.a0), ("b0", self.b0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Order in which predictors are visited within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub thin: usize,
    /// `false` pins theta0 and Theta at zero: plain horseshoe regression.
    pub pliable: bool,
    pub store_imputations: bool,
    pub sweep: SweepOrder,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_iter: 5000,
            burn_in: 500,
            seed: 1,
            thin: 1,
            pliable: true,
            store_imputations: false,
            sweep: SweepOrder::Ascending,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::Config("n_iter must be positive".into()));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::Config(format!(
                "burn_in ({}) must be smaller than n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be positive".into()));
        }
        if self.n_stored() == 0 {
            return Err(Error::Config("no draws would be stored; lower thin".into()));
        }
        Ok(())
    }

    pub fn n_stored(&self) -> usize {
        (self.n_iter - self.burn_in.min(self.n_iter)) / self.thin.max(1)
    }

    /// Whether iteration `t` (0-based) is kept.
    pub fn keeps(&self, t: usize) -> bool {
        t >= self.burn_in && (t - self.burn_in + 1).is_multiple_of(self.thin)
    }

    /// Modifier dimension actually sampled.
    pub fn active_q(&self, q: usize) -> usize {
        if self.pliable {
            q
        } else {
            0
        }
    }
}

/// Regression coefficients `(beta0, theta0, beta, Theta)`. Theta is stored
/// row-major by predictor so each `(beta_j, theta_j)` pair is local.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub beta0: f64,
    pub theta0: Vec<f64>,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    p: usize,
    q: usize,
}

impl Coefficients {
    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            beta0: 0.0,
            theta0: vec![0.0; q],
            beta: vec![0.0; p],
            theta: vec![0.0; p * q],
            p,
            q,
        }
    }

    pub fn from_parts(beta0: f64, theta0: Vec<f64>, beta: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        let (p, q) = (beta.len(), theta0.len());
        if theta.len() != p * q {
            return Err(Error::Shape(format!(
                "Theta has {} entries, expected p*q = {}",
                theta.len(),
                p * q
            )));
        }
        Ok(Self {
            beta0,
            theta0,
            beta,
            theta,
            p,
            q,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn theta_row(&self, j: usize) -> &[f64] {
        &self.theta[j * self.q..(j + 1) * self.q]
    }

    pub fn theta_row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.theta[j * self.q..(j + 1) * self.q]
    }

    /// Linear predictor for arbitrary design matrices.
    pub fn predict(&self, x: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<Vec<f64>> {
        let n = x.nrows();
        if x.ncols() != self.p || z.ncols() != self.q || z.nrows() != n {
            return Err(Error::Shape(format!(
                "coefficients are p={}, q={} but X is {}x{} and Z is {}x{}",
                self.p,
                self.q,
                x.nrows(),
                x.ncols(),
                z.nrows(),
                z.ncols()
            )));
        }
        let mut zi = vec![0.0; self.q];
        let eta = (0..n)
            .map(|i| {
                for (k, v) in zi.iter_mut().enumerate() {
                    *v = z[(i, k)];
                }
                let mut eta = self.beta0 + dot(&zi, &self.theta0);
                for j in 0..self.p {
                    let xij = x[(i, j)];
                    if xij != 0.0 {
                        eta += xij * (self.beta[j] + dot(&zi, self.theta_row(j)));
                    }
                }
                eta
            })
            .collect();
        Ok(eta)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Anything that carries a full set of regression coefficients.
pub trait HasCoefficients {
    fn coefficients(&self) -> Coefficients;
}

impl HasCoefficients for Coefficients {
    fn coefficients(&self) -> Coefficients {
        self.clone()
    }
}

/// `eta` for a parameter state on the training design.
pub fn linear_predictor<S: HasCoefficients + ?Sized>(state: &S, data: &Dataset) -> Result<Vec<f64>> {
    state.coefficients().predict(data.x(), data.z())
}

/// Block design `W_0 = [1, Z]` for `j = 0`, `W_j = [x_j, x_j * Z]` otherwise.
pub fn block_design(data: &Dataset, j: usize) -> Result<DMatrix<f64>> {
    let (n, p, q) = (data.n(), data.p(), data.q());
    if j > p {
        return Err(Error::IndexOutOfRange { index: j, max: p });
    }
    Ok(DMatrix::from_fn(n, 1 + q, |i, c| {
        let scale = if j == 0 { 1.0 } else { data.x()[(i, j - 1)] };
        if c == 0 {
            scale
        } else {
            scale * data.z()[(i, c - 1)]
        }
    }))
}

/// Complete parameter state of the Gaussian sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub coef: Coefficients,
    pub lambda_sq: Vec<f64>,
    pub nu: Vec<f64>,
    pub tau_sq: f64,
    pub xi: f64,
    pub sigma_sq: f64,
    /// Observed responses, with the current imputations in masked slots.
    pub y_completed: Vec<f64>,
}

impl GaussianState {
    /// Coefficients at zero, every scale at one, sigma^2 at the sample
    /// variance of the observed responses and missing responses at their mean.
    pub fn init(data: &Dataset) -> Result<Self> {
        let observed: Vec<f64> = data
            .y()
            .iter()
            .zip(data.missing())
            .filter(|(_, &m)| !m)
            .map(|(&y, _)| y)
            .collect();
        if observed.is_empty() {
            return Err(Error::InvalidDataset("every response is missing".into()));
        }
        let n_obs = observed.len() as f64;
        let mean = observed.iter().sum::<f64>() / n_obs;
        let var = if observed.len() > 1 {
            observed.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n_obs - 1.0)
        } else {
            0.0
        };
        let y_completed = data
            .y()
            .iter()
            .zip(data.missing())
            .map(|(&y, &m)| if m { mean } else { y })
            .collect();
        let p = data.p();
        Ok(Self {
            coef: Coefficients::zeros(p, data.q()),
            lambda_sq: vec![1.0; p],
            nu: vec![1.0; p],
            tau_sq: 1.0,
            xi: 1.0,
            sigma_sq: var.max(1e-6),
            y_completed,
        })
    }
}

impl HasCoefficients for GaussianState {
    fn coefficients(&self) -> Coefficients {
        self.coef.clone()
    }
}

/// Parameter state of the logistic sampler. Coefficients live in `p + 1`
/// blocks `gamma_j = (beta_j, theta_j)` of length `1 + q`; block 0 holds the
/// intercepts `(beta0, theta0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticState {
    pub gamma: Vec<f64>,
    pub omega: Vec<f64>,
    pub lambda_sq: Vec<f64>,
    pub nu: Vec<f64>,
    pub tau_sq: f64,
    pub xi: f64,
    p: usize,
    q: usize,
}

impl LogisticState {
    pub fn init(data: &Dataset) -> Result<Self> {
        let (n, p, q) = (data.n(), data.p(), data.q());
        Ok(Self {
            gamma: vec![0.0; (p + 1) * (1 + q)],
            omega: vec![0.25; n],
            lambda_sq: vec![1.0; p],
            nu: vec![1.0; p],
            tau_sq: 1.0,
            xi: 1.0,
            p,
            q,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn block_len(&self) -> usize {
        1 + self.q
    }

    pub fn block(&self, j: usize) -> &[f64] {
        let d = self.block_len();
        &self.gamma[j * d..(j + 1) * d]
    }

    pub fn block_mut(&mut self, j: usize) -> &mut [f64] {
        let d = self.block_len();
        &mut self.gamma[j * d..(j + 1) * d]
    }
}

impl HasCoefficients for LogisticState {
    fn coefficients(&self) -> Coefficients {
        let mut c = Coefficients::zeros(self.p, self.q);
        let b0 = self.block(0);
        c.beta0 = b0[0];
        c.theta0.copy_from_slice(&b0[1..]);
        for j in 0..self.p {
            let b = self.block(j + 1);
            c.beta[j] = b[0];
            c.theta_row_mut(j).copy_from_slice(&b[1..]);
        }
        c
    }
}
