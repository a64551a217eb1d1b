//! Polya-Gamma augmented Gibbs kernel for binary responses.
//!
//! Given `omega_i ~ PG(1, eta_i)` the logistic likelihood is proportional to
//! `exp(kappa' eta - eta' Omega eta / 2)` with `kappa = y - 1/2`, so each
//! coefficient block `gamma_j` has a Gaussian full conditional. Blocks are
//! `W_0 = [1, Z]` (intercepts, fixed prior variance `sigma0^2`) and
//! `W_j = [x_j, x_j * Z]` (horseshoe prior with scale `tau^2 lambda_j^2`).

use nalgebra::{DMatrix, DVector};

use crate::draws::PosteriorDraws;
use crate::error::{Error, Result};
use crate::model::{linear_predictor, Dataset, Family, HasCoefficients, Hyperparameters, LogisticState, SamplerConfig, SweepOrder};
use crate::rng::RngStream;
use crate::samplers::{sample_polya_gamma_1, sample_precision_gaussian, PrecisionGaussian};
use crate::shrinkage;

pub const REFRESH_EVERY: usize = 100;

/// Per-chain working vectors: `kappa = y - 1/2` and the maintained `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PGWorkspace {
    pub kappa: Vec<f64>,
    pub eta: Vec<f64>,
}

impl PGWorkspace {
    pub fn new(state: &LogisticState, data: &Dataset) -> Result<Self> {
        Ok(Self {
            kappa: data.y().iter().map(|y| y - 0.5).collect(),
            eta: linear_predictor(state, data)?,
        })
    }

    /// `max |eta - fresh| / (1 + max |fresh|)`.
    pub fn drift(&self, fresh: &[f64]) -> f64 {
        let scale = 1.0 + fresh.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.eta
            .iter()
            .zip(fresh)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

#[derive(Debug, Clone)]
pub struct LogisticKernel<'a> {
    data: &'a Dataset,
    hyper: Hyperparameters,
    q_active: usize,
}

impl<'a> LogisticKernel<'a> {
    pub fn new(data: &'a Dataset, hyper: Hyperparameters, pliable: bool) -> Result<Self> {
        hyper.validate()?;
        if data.family() != Family::Binomial {
            return Err(Error::Unsupported(format!(
                "the logistic sampler cannot fit a {} response",
                data.family()
            )));
        }
        Ok(Self {
            data,
            hyper,
            q_active: if pliable { data.q() } else { 0 },
        })
    }

    /// Dimension of each block that is actually sampled.
    pub fn block_dim(&self) -> usize {
        1 + self.q_active
    }

    /// Writes row `i` of `W_j` (active columns only) into `w`.
    fn design_row(&self, j: usize, i: usize, w: &mut [f64]) {
        let scale = if j == 0 { 1.0 } else { self.data.x_col(j - 1)[i] };
        w[0] = scale;
        let zi = self.data.z_row(i);
        for k in 0..self.q_active {
            w[1 + k] = scale * zi[k];
        }
    }

    pub fn update_omega(&self, state: &mut LogisticState, ws: &PGWorkspace, rng: &mut RngStream) -> Result<()> {
        for (w, &eta) in state.omega.iter_mut().zip(&ws.eta) {
            *w = sample_polya_gamma_1(eta, rng)?;
        }
        Ok(())
    }

    /// Full conditional of block `j` (0 = intercepts) in precision form:
    /// precision `W_j' Omega W_j + prior` and linear term
    /// `W_j' (kappa - Omega eta_{-j})`.
    pub fn block_conditional(&self, state: &LogisticState, ws: &PGWorkspace, j: usize) -> Result<PrecisionGaussian> {
        let p = self.data.p();
        if j > p {
            return Err(Error::IndexOutOfRange { index: j, max: p });
        }
        let d = self.block_dim();
        let mut gram = DMatrix::zeros(d, d);
        let mut score = DVector::zeros(d);
        let mut w = vec![0.0; d];
        for i in 0..self.data.n() {
            if j > 0 && self.data.x_col(j - 1)[i] == 0.0 {
                continue;
            }
            self.design_row(j, i, &mut w);
            let omega = state.omega[i];
            let resid = ws.kappa[i] - omega * ws.eta[i];
            for a in 0..d {
                score[a] += w[a] * resid;
                let wa = omega * w[a];
                for b in 0..=a {
                    gram[(a, b)] += wa * w[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                gram[(b, a)] = gram[(a, b)];
            }
        }
        // eta_{-j} = eta - W_j gamma_j.
        let current = DVector::from_column_slice(&state.block(j)[..d]);
        score += &gram * current;
        let prior_precision = if j == 0 {
            1.0 / self.hyper.sigma0_sq
        } else {
            1.0 / (state.tau_sq * state.lambda_sq[j - 1])
        };
        for a in 0..d {
            gram[(a, a)] += prior_precision;
        }
        PrecisionGaussian::new(gram, score).map_err(|e| match e {
            Error::Domain(_) => Error::Singular { block: j },
            e => e,
        })
    }

    pub fn update_block(
        &self,
        state: &mut LogisticState,
        ws: &mut PGWorkspace,
        j: usize,
        rng: &mut RngStream,
    ) -> Result<()> {
        let conditional = self.block_conditional(state, ws, j)?;
        let new = sample_precision_gaussian(&conditional, rng).map_err(|e| e.for_block(j))?;
        let d = self.block_dim();
        let delta: Vec<f64> = new.iter().zip(&state.block(j)[..d]).map(|(a, b)| a - b).collect();
        state.block_mut(j)[..d].copy_from_slice(new.as_slice());
        let mut w = vec![0.0; d];
        for i in 0..self.data.n() {
            if j > 0 && self.data.x_col(j - 1)[i] == 0.0 {
                continue;
            }
            self.design_row(j, i, &mut w);
            ws.eta[i] += w.iter().zip(&delta).map(|(a, b)| a * b).sum::<f64>();
        }
        Ok(())
    }

    /// Local and global scales over blocks `1..=p`; the intercept block is
    /// not shrunk.
    pub fn update_scales(&self, state: &mut LogisticState, rng: &mut RngStream) -> Result<()> {
        let d = self.block_dim();
        let norms: Vec<f64> = (1..=self.data.p())
            .map(|j| state.block(j)[..d].iter().map(|g| g * g).sum())
            .collect();
        shrinkage::update_local(&mut state.lambda_sq, &mut state.nu, &norms, state.tau_sq, d, rng)?;
        shrinkage::update_global(&mut state.tau_sq, &mut state.xi, &state.lambda_sq, &norms, d, rng)
    }

    pub fn step(
        &self,
        state: &mut LogisticState,
        ws: &mut PGWorkspace,
        order: SweepOrder,
        rng: &mut RngStream,
    ) -> Result<()> {
        self.update_omega(state, ws, rng)?;
        self.update_block(state, ws, 0, rng)?;
        let p = self.data.p();
        for idx in 1..=p {
            let j = match order {
                SweepOrder::Ascending => idx,
                SweepOrder::Descending => p + 1 - idx,
            };
            self.update_block(state, ws, j, rng)?;
        }
        self.update_scales(state, rng)
    }
}

pub fn run_chain_logistic(data: &Dataset, config: &SamplerConfig, hyper: &Hyperparameters) -> Result<PosteriorDraws> {
    let mut rng = RngStream::new(config.seed);
    run_chain_logistic_with_rng(data, config, hyper, &mut rng)
}

pub fn run_chain_logistic_with_rng(
    data: &Dataset,
    config: &SamplerConfig,
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<PosteriorDraws> {
    config.validate()?;
    let kernel = LogisticKernel::new(data, *hyper, config.pliable)?;
    if data.n_missing() > 0 {
        return Err(Error::Unsupported("missing binary responses".into()));
    }
    let mut state = LogisticState::init(data)?;
    let mut ws = PGWorkspace::new(&state, data)?;
    let mut draws = PosteriorDraws::allocate(config.n_stored(), data.p(), data.q(), false, None);
    let mut stored = 0;

    for t in 0..config.n_iter {
        kernel
            .step(&mut state, &mut ws, config.sweep, rng)
            .map_err(|e| e.at_iteration(t))?;

        if (t + 1) % REFRESH_EVERY == 0 {
            let fresh = linear_predictor(&state, data)?;
            let drift = ws.drift(&fresh);
            draws.diagnostics.max_drift = draws.diagnostics.max_drift.max(drift);
            draws.diagnostics.refreshes += 1;
            ws.eta = fresh;
        }

        if config.keeps(t) {
            draws.record(stored, &state.coefficients(), &state.lambda_sq, state.tau_sq);
            stored += 1;
        }
    }
    Ok(draws)
}
