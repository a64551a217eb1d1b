//! Gibbs kernel for the Gaussian pliable horseshoe, with data augmentation
//! for missing responses.
//!
//! One iteration: impute missing `y`, then for each predictor `beta_j`
//! followed by `theta_j`, then the local scales, the global scale, the
//! intercepts `(beta0, theta0)` and finally `sigma^2`.
//!
//! The residual `r = y - eta` is maintained incrementally (O(n) per scalar
//! update, O(nq) per modifier block) and recomputed from scratch every
//! [`REFRESH_EVERY`] iterations.

use nalgebra::{DMatrix, DVector};

use crate::draws::PosteriorDraws;
use crate::error::{Error, Result};
use crate::model::{dot, linear_predictor, Dataset, Family, GaussianState, Hyperparameters, SamplerConfig, SweepOrder};
use crate::rng::RngStream;
use crate::samplers::{
    draw_inverse_gamma, sample_precision_gaussian, sample_standard_normal, PrecisionGaussian,
};
use crate::shrinkage;

pub const REFRESH_EVERY: usize = 100;

/// `y_completed - eta(state)`, kept in step with the state by every update.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    r: Vec<f64>,
}

impl Residual {
    pub fn compute(state: &GaussianState, data: &Dataset) -> Result<Self> {
        let eta = linear_predictor(state, data)?;
        Ok(Self {
            r: state.y_completed.iter().zip(&eta).map(|(y, e)| y - e).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn sum_sq(&self) -> f64 {
        self.r.iter().map(|v| v * v).sum()
    }

    /// `max |self - other| / (1 + max |y|)`.
    pub fn drift(&self, other: &Residual, y: &[f64]) -> f64 {
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.r
            .iter()
            .zip(&other.r)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

/// Data-dependent quantities that stay fixed over a chain, plus the
/// hyperparameters. Update methods take predictor indices `j` in `0..p`.
#[derive(Debug, Clone)]
pub struct GaussianKernel<'a> {
    data: &'a Dataset,
    hyper: Hyperparameters,
    q_active: usize,
    x_sq_norms: Vec<f64>,
    /// `Z_j' Z_j` with `Z_j = diag(x_j) Z`.
    modifier_grams: Vec<DMatrix<f64>>,
    z_gram: DMatrix<f64>,
}

impl<'a> GaussianKernel<'a> {
    pub fn new(data: &'a Dataset, hyper: Hyperparameters, pliable: bool) -> Result<Self> {
        hyper.validate()?;
        let (n, p) = (data.n(), data.p());
        let q_active = if pliable { data.q() } else { 0 };
        let x_sq_norms = (0..p).map(|j| data.x_col(j).iter().map(|v| v * v).sum()).collect();

        let mut modifier_grams = vec![DMatrix::zeros(q_active, q_active); p];
        let mut z_gram = DMatrix::zeros(q_active, q_active);
        if q_active > 0 {
            for i in 0..n {
                let zi = data.z_row(i);
                let outer = DMatrix::from_fn(q_active, q_active, |a, b| zi[a] * zi[b]);
                z_gram += &outer;
                for (j, gram) in modifier_grams.iter_mut().enumerate() {
                    let xij = data.x_col(j)[i];
                    if xij != 0.0 {
                        *gram += &outer * (xij * xij);
                    }
                }
            }
        }
        Ok(Self {
            data,
            hyper,
            q_active,
            x_sq_norms,
            modifier_grams,
            z_gram,
        })
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn q_active(&self) -> usize {
        self.q_active
    }

    /// Block dimension seen by the shrinkage prior.
    pub fn block_dim(&self) -> usize {
        1 + self.q_active
    }

    /// Full conditional of `beta_j`: returns `(mean, variance)`.
    pub fn beta_conditional(&self, state: &GaussianState, residual: &Residual, j: usize) -> Result<(f64, f64)> {
        let xj = self.data.x_col(j);
        let s2 = state.sigma_sq;
        let prior_var = state.lambda_sq[j] * state.tau_sq;
        // x_j'(r^(-j) - Z_j theta_j) = x_j' r + |x_j|^2 beta_j.
        let score = dot(xj, &residual.r) + self.x_sq_norms[j] * state.coef.beta[j];
        let precision = self.x_sq_norms[j] / s2 + 1.0 / prior_var;
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::Singular { block: j + 1 });
        }
        let var = 1.0 / precision;
        Ok((var * score / s2, var))
    }

    pub fn update_beta_j(
        &self,
        state: &mut GaussianState,
        residual: &mut Residual,
        j: usize,
        rng: &mut RngStream,
    ) -> Result<()> {
        let (mean, var) = self.beta_conditional(state, residual, j)?;
        let new = mean + var.sqrt() * sample_standard_normal(rng);
        let delta = new - state.coef.beta[j];
        state.coef.beta[j] = new;
        for (r, x) in residual.r.iter_mut().zip(self.data.x_col(j)) {
            *r -= x * delta;
        }
        Ok(())
    }

    /// Full conditional of `theta_j` in precision form.
    pub fn theta_conditional(&self, state: &GaussianState, residual: &Residual, j: usize) -> Result<PrecisionGaussian> {
        let q = self.q_active;
        let xj = self.data.x_col(j);
        let s2 = state.sigma_sq;
        let gram = &self.modifier_grams[j];
        let mut score = DVector::zeros(q);
        for (i, &xij) in xj.iter().enumerate() {
            if xij != 0.0 {
                let w = xij * residual.r[i];
                for (k, zk) in self.data.z_row(i).iter().enumerate() {
                    score[k] += w * zk;
                }
            }
        }
        // Z_j'(r + Z_j theta_j): add back the current block's contribution.
        let theta = DVector::from_column_slice(state.coef.theta_row(j));
        score += gram * theta;
        let prior_precision = 1.0 / (state.lambda_sq[j] * state.tau_sq);
        let mut precision = gram / s2;
        for k in 0..q {
            precision[(k, k)] += prior_precision;
        }
        PrecisionGaussian::new(precision, score / s2).map_err(|e| match e {
            Error::Domain(_) => Error::Singular { block: j + 1 },
            e => e,
        })
    }

    /// No-op when the kernel was built with `pliable = false` or `q = 0`.
    pub fn update_theta_j(
        &self,
        state: &mut GaussianState,
        residual: &mut Residual,
        j: usize,
        rng: &mut RngStream,
    ) -> Result<()> {
        if self.q_active == 0 {
            return Ok(());
        }
        let conditional = self.theta_conditional(state, residual, j)?;
        let new = sample_precision_gaussian(&conditional, rng).map_err(|e| e.for_block(j + 1))?;
        let delta: Vec<f64> = new
            .iter()
            .zip(state.coef.theta_row(j))
            .map(|(a, b)| a - b)
            .collect();
        state.coef.theta_row_mut(j).copy_from_slice(new.as_slice());
        for (i, &xij) in self.data.x_col(j).iter().enumerate() {
            if xij != 0.0 {
                residual.r[i] -= xij * dot(self.data.z_row(i), &delta);
            }
        }
        Ok(())
    }

    fn block_sq_norms(&self, state: &GaussianState) -> Vec<f64> {
        (0..self.data.p())
            .map(|j| {
                let b = state.coef.beta[j];
                b * b + state.coef.theta_row(j).iter().map(|t| t * t).sum::<f64>()
            })
            .collect()
    }

    pub fn update_local_scales(&self, state: &mut GaussianState, rng: &mut RngStream) -> Result<()> {
        let norms = self.block_sq_norms(state);
        shrinkage::update_local(
            &mut state.lambda_sq,
            &mut state.nu,
            &norms,
            state.tau_sq,
            self.block_dim(),
            rng,
        )
    }

    pub fn update_global_scale(&self, state: &mut GaussianState, rng: &mut RngStream) -> Result<()> {
        let norms = self.block_sq_norms(state);
        shrinkage::update_global(
            &mut state.tau_sq,
            &mut state.xi,
            &state.lambda_sq,
            &norms,
            self.block_dim(),
            rng,
        )
    }

    /// Full conditional of `beta0`: `(mean, variance)`.
    pub fn beta0_conditional(&self, state: &GaussianState, residual: &Residual) -> (f64, f64) {
        let n = self.data.n() as f64;
        let s2 = state.sigma_sq;
        let sum_r: f64 = residual.r.iter().sum::<f64>() + n * state.coef.beta0;
        let var = 1.0 / (n / s2 + 1.0 / self.hyper.sigma0_sq);
        (var * sum_r / s2, var)
    }

    /// Full conditional of `theta0` in precision form.
    pub fn theta0_conditional(&self, state: &GaussianState, residual: &Residual) -> Result<PrecisionGaussian> {
        let q = self.q_active;
        let s2 = state.sigma_sq;
        let mut score = DVector::zeros(q);
        for (i, r) in residual.r.iter().enumerate() {
            for (k, zk) in self.data.z_row(i).iter().enumerate() {
                score[k] += r * zk;
            }
        }
        score += &self.z_gram * DVector::from_column_slice(&state.coef.theta0);
        let mut precision = &self.z_gram / s2;
        for k in 0..q {
            precision[(k, k)] += 1.0 / self.hyper.sigma0_sq;
        }
        PrecisionGaussian::new(precision, score / s2).map_err(|e| match e {
            Error::Domain(_) => Error::Singular { block: 0 },
            e => e,
        })
    }

    pub fn update_intercepts(
        &self,
        state: &mut GaussianState,
        residual: &mut Residual,
        rng: &mut RngStream,
    ) -> Result<()> {
        let (mean, var) = self.beta0_conditional(state, residual);
        let new = mean + var.sqrt() * sample_standard_normal(rng);
        let delta = new - state.coef.beta0;
        state.coef.beta0 = new;
        residual.r.iter_mut().for_each(|r| *r -= delta);

        if self.q_active == 0 {
            return Ok(());
        }
        let conditional = self.theta0_conditional(state, residual)?;
        let new = sample_precision_gaussian(&conditional, rng).map_err(|e| e.for_block(0))?;
        let delta: Vec<f64> = new.iter().zip(&state.coef.theta0).map(|(a, b)| a - b).collect();
        state.coef.theta0.copy_from_slice(new.as_slice());
        for (i, r) in residual.r.iter_mut().enumerate() {
            *r -= dot(self.data.z_row(i), &delta);
        }
        Ok(())
    }

    /// `(shape, rate)` of the `sigma^2` conditional.
    pub fn sigma2_conditional(&self, residual: &Residual) -> (f64, f64) {
        (
            self.hyper.a0 + self.data.n() as f64 / 2.0,
            self.hyper.b0 + 0.5 * residual.sum_sq(),
        )
    }

    pub fn update_sigma2(&self, state: &mut GaussianState, residual: &Residual, rng: &mut RngStream) -> Result<()> {
        let (shape, rate) = self.sigma2_conditional(residual);
        state.sigma_sq = draw_inverse_gamma(shape, rate, rng)?;
        Ok(())
    }

    /// Redraws every masked response from `N(eta_i, sigma^2)`.
    pub fn impute_missing(
        &self,
        state: &mut GaussianState,
        residual: &mut Residual,
        rng: &mut RngStream,
    ) -> Result<()> {
        if self.data.family() != Family::Gaussian {
            return Err(Error::Unsupported(
                "response imputation requires the gaussian family".into(),
            ));
        }
        let sd = state.sigma_sq.sqrt();
        for (i, &missing) in self.data.missing().iter().enumerate() {
            if missing {
                let eta = state.y_completed[i] - residual.r[i];
                let noise = sd * sample_standard_normal(rng);
                state.y_completed[i] = eta + noise;
                residual.r[i] = noise;
            }
        }
        Ok(())
    }

    /// One full sweep in the fixed conditioning order.
    pub fn step(
        &self,
        state: &mut GaussianState,
        residual: &mut Residual,
        order: SweepOrder,
        rng: &mut RngStream,
    ) -> Result<()> {
        if self.data.n_missing() > 0 {
            self.impute_missing(state, residual, rng)?;
        }
        let p = self.data.p();
        for idx in 0..p {
            let j = match order {
                SweepOrder::Ascending => idx,
                SweepOrder::Descending => p - 1 - idx,
            };
            self.update_beta_j(state, residual, j, rng)?;
            self.update_theta_j(state, residual, j, rng)?;
        }
        self.update_local_scales(state, rng)?;
        self.update_global_scale(state, rng)?;
        self.update_intercepts(state, residual, rng)?;
        self.update_sigma2(state, residual, rng)
    }
}

/// Runs a chain seeded from `config.seed`.
pub fn run_chain(data: &Dataset, config: &SamplerConfig, hyper: &Hyperparameters) -> Result<PosteriorDraws> {
    let mut rng = RngStream::new(config.seed);
    run_chain_with_rng(data, config, hyper, &mut rng)
}

pub fn run_chain_with_rng(
    data: &Dataset,
    config: &SamplerConfig,
    hyper: &Hyperparameters,
    rng: &mut RngStream,
) -> Result<PosteriorDraws> {
    config.validate()?;
    if data.family() != Family::Gaussian {
        return Err(Error::Unsupported(format!(
            "the gaussian sampler cannot fit a {} response",
            data.family()
        )));
    }
    let kernel = GaussianKernel::new(data, *hyper, config.pliable)?;
    let mut state = GaussianState::init(data)?;
    let mut residual = Residual::compute(&state, data)?;

    let imputed = (config.store_imputations && data.n_missing() > 0).then(|| data.missing_indices());
    let mut draws = PosteriorDraws::allocate(config.n_stored(), data.p(), data.q(), true, imputed);
    let mut stored = 0;

    for t in 0..config.n_iter {
        kernel
            .step(&mut state, &mut residual, config.sweep, rng)
            .map_err(|e| e.at_iteration(t))?;

        if (t + 1) % REFRESH_EVERY == 0 {
            let fresh = Residual::compute(&state, data)?;
            let drift = residual.drift(&fresh, &state.y_completed);
            draws.diagnostics.max_drift = draws.diagnostics.max_drift.max(drift);
            draws.diagnostics.refreshes += 1;
            residual = fresh;
        }

        if config.keeps(t) {
            draws.record(stored, &state.coef, &state.lambda_sq, state.tau_sq);
            if let Some(sigma) = draws.sigma_sq.as_mut() {
                sigma[stored] = state.sigma_sq;
            }
            if let Some(imp) = draws.imputed.as_mut() {
                let ns = config.n_stored();
                for (m, &i) in imp.indices.iter().enumerate() {
                    imp.values[m * ns + stored] = state.y_completed[i];
                }
            }
            stored += 1;
        }
    }
    debug_assert_eq!(stored, draws.n_stored);
    Ok(draws)
}
