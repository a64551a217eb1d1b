//! Storage for post-burn-in draws.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Coefficients;

/// A scalar parameter addressable in [`PosteriorDraws`]. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    Beta0,
    Theta0(usize),
    Beta(usize),
    Theta(usize, usize),
    LambdaSq(usize),
    TauSq,
    SigmaSq,
}

impl fmt::Display for Param {
    /// 1-based names, matching the usual `beta_1 .. beta_p` notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Param::Beta0 => write!(f, "beta0"),
            Param::Theta0(k) => write!(f, "theta0_{}", k + 1),
            Param::Beta(j) => write!(f, "beta_{}", j + 1),
            Param::Theta(j, k) => write!(f, "theta_{}_{}", j + 1, k + 1),
            Param::LambdaSq(j) => write!(f, "lambda_sq_{}", j + 1),
            Param::TauSq => write!(f, "tau_sq"),
            Param::SigmaSq => write!(f, "sigma_sq"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    /// Largest scaled gap between the maintained and the recomputed
    /// residual (Gaussian) or linear predictor (logistic) at a refresh.
    pub max_drift: f64,
    pub refreshes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputedDraws {
    pub indices: Vec<usize>,
    /// `values[m * n_stored + s]` is draw `s` of the `m`-th missing response.
    pub values: Vec<f64>,
}

/// Parameter-major chains: every per-parameter chain is a contiguous slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub n_stored: usize,
    pub p: usize,
    pub q: usize,
    pub beta0: Vec<f64>,
    pub theta0: Vec<f64>,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub lambda_sq: Vec<f64>,
    pub tau_sq: Vec<f64>,
    /// Absent for the logistic model.
    pub sigma_sq: Option<Vec<f64>>,
    pub imputed: Option<ImputedDraws>,
    pub diagnostics: ChainDiagnostics,
}

impl PosteriorDraws {
    pub(crate) fn allocate(
        n_stored: usize,
        p: usize,
        q: usize,
        with_sigma: bool,
        imputed_indices: Option<Vec<usize>>,
    ) -> Self {
        Self {
            n_stored,
            p,
            q,
            beta0: vec![0.0; n_stored],
            theta0: vec![0.0; q * n_stored],
            beta: vec![0.0; p * n_stored],
            theta: vec![0.0; p * q * n_stored],
            lambda_sq: vec![0.0; p * n_stored],
            tau_sq: vec![0.0; n_stored],
            sigma_sq: with_sigma.then(|| vec![0.0; n_stored]),
            imputed: imputed_indices.map(|indices| ImputedDraws {
                values: vec![0.0; indices.len() * n_stored],
                indices,
            }),
            diagnostics: ChainDiagnostics::default(),
        }
    }

    pub(crate) fn record(&mut self, s: usize, coef: &Coefficients, lambda_sq: &[f64], tau_sq: f64) {
        self.set_coefficients(s, coef);
        for (j, l) in lambda_sq.iter().enumerate() {
            self.lambda_sq[j * self.n_stored + s] = *l;
        }
        self.tau_sq[s] = tau_sq;
    }

    /// Overwrites the coefficients of draw `s`; scales are left alone.
    pub fn set_coefficients(&mut self, s: usize, coef: &Coefficients) {
        let ns = self.n_stored;
        self.beta0[s] = coef.beta0;
        for (k, &v) in coef.theta0.iter().enumerate() {
            self.theta0[k * ns + s] = v;
        }
        for j in 0..self.p {
            self.beta[j * ns + s] = coef.beta[j];
            for (k, &v) in coef.theta_row(j).iter().enumerate() {
                self.theta[(j * self.q + k) * ns + s] = v;
            }
        }
    }

    pub fn chain(&self, param: Param) -> Option<&[f64]> {
        let ns = self.n_stored;
        let span = |v: &[f64], idx: usize| -> Option<std::ops::Range<usize>> {
            let r = idx * ns..(idx + 1) * ns;
            (r.end <= v.len()).then_some(r)
        };
        match param {
            Param::Beta0 => Some(&self.beta0[..]),
            Param::TauSq => Some(&self.tau_sq[..]),
            Param::SigmaSq => self.sigma_sq.as_deref(),
            Param::Theta0(k) if k < self.q => span(&self.theta0, k).map(|r| &self.theta0[r]),
            Param::Beta(j) if j < self.p => span(&self.beta, j).map(|r| &self.beta[r]),
            Param::LambdaSq(j) if j < self.p => span(&self.lambda_sq, j).map(|r| &self.lambda_sq[r]),
            Param::Theta(j, k) if j < self.p && k < self.q => {
                span(&self.theta, j * self.q + k).map(|r| &self.theta[r])
            }
            _ => None,
        }
    }

    /// Every coefficient parameter, in storage order.
    pub fn coefficient_params(&self) -> Vec<Param> {
        let mut out = vec![Param::Beta0];
        out.extend((0..self.q).map(Param::Theta0));
        out.extend((0..self.p).map(Param::Beta));
        for j in 0..self.p {
            out.extend((0..self.q).map(move |k| Param::Theta(j, k)));
        }
        out
    }

    /// Coefficient, scale and noise parameters present in this chain.
    pub fn all_params(&self) -> Vec<Param> {
        let mut out = self.coefficient_params();
        out.extend((0..self.p).map(Param::LambdaSq));
        out.push(Param::TauSq);
        if self.sigma_sq.is_some() {
            out.push(Param::SigmaSq);
        }
        out
    }

    /// Coefficients at draw `s`.
    pub fn draw(&self, s: usize) -> Coefficients {
        let ns = self.n_stored;
        let mut c = Coefficients::zeros(self.p, self.q);
        c.beta0 = self.beta0[s];
        for k in 0..self.q {
            c.theta0[k] = self.theta0[k * ns + s];
        }
        for j in 0..self.p {
            c.beta[j] = self.beta[j * ns + s];
            for k in 0..self.q {
                c.theta[j * self.q + k] = self.theta[(j * self.q + k) * ns + s];
            }
        }
        c
    }

    /// Posterior-mean coefficients.
    pub fn mean_coefficients(&self) -> Coefficients {
        let ns = self.n_stored as f64;
        let chunk_means = |v: &[f64]| -> Vec<f64> {
            v.chunks(self.n_stored).map(|c| c.iter().sum::<f64>() / ns).collect()
        };
        Coefficients::from_parts(
            self.beta0.iter().sum::<f64>() / ns,
            chunk_means(&self.theta0),
            chunk_means(&self.beta),
            chunk_means(&self.theta),
        )
        .expect("draw storage is consistent")
    }
}
