//! Random variate generation used by the Gibbs kernels.
//!
//! Inverse-gamma is parameterised by shape and *rate*: density proportional
//! to `x^-(a+1) exp(-b/x)`. Every full conditional in the kernels is written
//! with additive rate terms, so this is the natural form.

mod polya_gamma;

pub use polya_gamma::{polya_gamma_1_mean, polya_gamma_1_variance, sample_polya_gamma_1};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Relative asymmetry tolerated in a precision matrix.
const SYMMETRY_TOL: f64 = 1e-10;

/// Ridge multipliers (times `trace(P) / d`) tried after a failed Cholesky.
const RIDGE_STEPS: [f64; 2] = [1e-8, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGammaParams {
    shape: f64,
    rate: f64,
}

impl InverseGammaParams {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!(
                "inverse-gamma needs shape > 0 and rate > 0, got shape={shape}, rate={rate}"
            )));
        }
        Ok(Self { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `b / (a - 1)`, defined for shape > 1.
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.rate / (self.shape - 1.0))
    }
}

/// Draws `X = b / G` with `G ~ Gamma(a, 1)`.
pub fn sample_inverse_gamma(params: InverseGammaParams, rng: &mut RngStream) -> f64 {
    // shape > 0 is guaranteed by the constructor.
    let gamma = Gamma::new(params.shape, 1.0).expect("validated shape");
    let g: f64 = gamma.sample(rng);
    params.rate / g
}

/// Convenience wrapper that validates and draws in one step.
pub fn draw_inverse_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(sample_inverse_gamma(InverseGammaParams::new(shape, rate)?, rng))
}

pub fn sample_standard_normal(rng: &mut RngStream) -> f64 {
    rng.sample(StandardNormal)
}

/// `N(P^-1 h, P^-1)` described by its precision `P` and linear term `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionGaussian {
    precision: DMatrix<f64>,
    linear: DVector<f64>,
}

impl PrecisionGaussian {
    pub fn new(precision: DMatrix<f64>, linear: DVector<f64>) -> Result<Self> {
        let d = precision.nrows();
        if precision.ncols() != d || linear.len() != d {
            return Err(Error::Shape(format!(
                "precision is {}x{}, linear term has length {}",
                precision.nrows(),
                precision.ncols(),
                linear.len()
            )));
        }
        let scale = precision.amax().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..i {
                if (precision[(i, j)] - precision[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::Domain(format!(
                        "precision matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if precision.iter().chain(linear.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("precision or linear term is not finite".into()));
        }
        Ok(Self { precision, linear })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    /// Cholesky factor of the precision, escalating the ridge if needed.
    pub fn factor(&self) -> Result<Cholesky<f64, Dyn>> {
        if let Some(chol) = Cholesky::new(self.precision.clone()) {
            return Ok(chol);
        }
        let d = self.dim().max(1) as f64;
        let base = (self.precision.trace() / d).abs().max(f64::MIN_POSITIVE);
        for step in RIDGE_STEPS {
            let mut ridged = self.precision.clone();
            for i in 0..self.dim() {
                ridged[(i, i)] += step * base;
            }
            if let Some(chol) = Cholesky::new(ridged) {
                return Ok(chol);
            }
        }
        Err(Error::NotPositiveDefinite)
    }

    /// Posterior mean `P^-1 h`.
    pub fn mean(&self) -> Result<DVector<f64>> {
        Ok(self.factor()?.solve(&self.linear))
    }
}

/// Draws from `N(P^-1 h, P^-1)` via `P = L L^T`: the mean solves `P m = h`,
/// and the noise is `L^-T z`. The inverse is never formed.
pub fn sample_precision_gaussian(g: &PrecisionGaussian, rng: &mut RngStream) -> Result<DVector<f64>> {
    let chol = g.factor()?;
    let mut draw = chol.solve(&g.linear);
    let z = DVector::from_fn(g.dim(), |_, _| sample_standard_normal(rng));
    let noise = chol
        .l_dirty()
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::NotPositiveDefinite)?;
    draw += noise;
    Ok(draw)
}
