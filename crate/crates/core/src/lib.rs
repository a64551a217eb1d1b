//! Bayesian pliable lasso with a shared horseshoe prior.
//!
//! The linear predictor is
//! `eta_i = beta0 + z_i' theta0 + sum_j x_ij (beta_j + z_i' theta_j)`:
//! every predictor's effect is modified by the shared covariates `z`. A
//! single local scale `lambda_j` shrinks `beta_j` and `theta_j` together,
//! and a global scale `tau` shrinks everything.
//!
//! * [`gaussian`]: Gibbs sampler for continuous responses, imputing missing
//!   responses as latent variables.
//! * [`logistic`]: Polya-Gamma augmented Gibbs sampler for binary responses.
//! * [`simgen`], [`metrics`], [`experiment`], [`repro`]: simulation studies.
//! * [`summary`]: posterior means, credible intervals, selection, ACF.

pub mod draws;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod logistic;
pub mod metrics;
pub mod model;
pub mod repro;
pub mod rng;
pub mod samplers;
pub mod shrinkage;
pub mod simgen;
pub mod standardize;
pub mod summary;

pub use draws::{ChainDiagnostics, Param, PosteriorDraws};
pub use error::{Error, Result};
pub use experiment::{fit, fit_with_rng};
pub use model::{
    block_design, linear_predictor, Coefficients, Dataset, Family, GaussianState, HasCoefficients,
    Hyperparameters, LogisticState, SamplerConfig, SweepOrder,
};
pub use rng::RngStream;
