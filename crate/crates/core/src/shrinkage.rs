//! Horseshoe scale updates shared by the Gaussian and logistic kernels.
//!
//! Half-Cauchy scales are written as inverse-gamma mixtures,
//! `lambda_j^2 | nu_j ~ IG(1/2, 1/nu_j)`, `nu_j ~ IG(1/2, 1)` and likewise
//! for `tau^2` with `xi`, which makes every conditional inverse-gamma. The
//! auxiliary conditionals are `nu_j | lambda_j^2 ~ IG(1, 1 + 1/lambda_j^2)`
//! and `xi | tau^2 ~ IG(1, 1 + 1/tau^2)`. One local scale per predictor is
//! shared by its whole block `(beta_j, theta_j)`.

use crate::error::Result;
use crate::rng::RngStream;
use crate::samplers::draw_inverse_gamma;

/// Scales are kept inside this range so products of two stay representable.
pub const SCALE_MIN: f64 = 1e-150;
pub const SCALE_MAX: f64 = 1e150;

fn clamp_scale(v: f64) -> f64 {
    v.clamp(SCALE_MIN, SCALE_MAX)
}

/// Shape of the `lambda_j^2` conditional for blocks of dimension `d`.
pub fn local_shape(block_dim: usize) -> f64 {
    (block_dim as f64 + 1.0) / 2.0
}

/// Shape of the `nu_j` and `xi` conditionals.
pub const AUXILIARY_SHAPE: f64 = 1.0;

/// Shape of the `tau^2` conditional for `p` blocks of dimension `d`.
pub fn global_shape(p: usize, block_dim: usize) -> f64 {
    ((p * block_dim) as f64 + 1.0) / 2.0
}

/// Draws each `lambda_j^2` then `nu_j`.
///
/// `block_sq_norms[j]` is `beta_j^2 + |theta_j|^2`.
pub fn update_local(
    lambda_sq: &mut [f64],
    nu: &mut [f64],
    block_sq_norms: &[f64],
    tau_sq: f64,
    block_dim: usize,
    rng: &mut RngStream,
) -> Result<()> {
    let shape = local_shape(block_dim);
    for j in 0..lambda_sq.len() {
        let rate = 1.0 / nu[j] + block_sq_norms[j] / (2.0 * tau_sq);
        lambda_sq[j] = clamp_scale(draw_inverse_gamma(shape, rate, rng)?);
        nu[j] = clamp_scale(draw_inverse_gamma(AUXILIARY_SHAPE, 1.0 + 1.0 / lambda_sq[j], rng)?);
    }
    Ok(())
}

/// Draws `tau^2` then `xi`.
pub fn update_global(
    tau_sq: &mut f64,
    xi: &mut f64,
    lambda_sq: &[f64],
    block_sq_norms: &[f64],
    block_dim: usize,
    rng: &mut RngStream,
) -> Result<()> {
    let shape = global_shape(lambda_sq.len(), block_dim);
    let weighted: f64 = block_sq_norms.iter().zip(lambda_sq).map(|(s, l)| s / l).sum();
    let rate = 1.0 / *xi + 0.5 * weighted;
    *tau_sq = clamp_scale(draw_inverse_gamma(shape, rate, rng)?);
    *xi = clamp_scale(draw_inverse_gamma(AUXILIARY_SHAPE, 1.0 + 1.0 / *tau_sq, rng)?);
    Ok(())
}
