//! Exact PG(1, z) draws by Devroye's alternating-series rejection method.
//!
//! A PG(1, z) variate is `J*(1, z/2) / 4`. The proposal for `J*` mixes a
//! truncated exponential (right of `TRUNC`) with a truncated inverse Gaussian
//! (left of `TRUNC`); acceptance is decided by bracketing the target density
//! with partial sums of its alternating series.

use std::f64::consts::{PI, SQRT_2};

use rand_distr::{Distribution, Exp1};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::sample_standard_normal;

const TRUNC: f64 = 0.64;
const TRUNC_RECIP: f64 = 1.0 / TRUNC;

/// `E[PG(1, z)] = tanh(z/2) / (2z)`, with the limit 1/4 at zero.
pub fn polya_gamma_1_mean(z: f64) -> f64 {
    let z = z.abs();
    if z < 1e-6 {
        0.25
    } else {
        (0.5 * z).tanh() / (2.0 * z)
    }
}

/// `Var[PG(1, z)] = (sinh z - z) / (4 z^3 cosh^2(z/2))`, 1/24 at zero.
pub fn polya_gamma_1_variance(z: f64) -> f64 {
    let z = z.abs();
    if z < 1e-3 {
        1.0 / 24.0
    } else if z > 300.0 {
        // sinh overflows; sinh(z) / cosh^2(z/2) -> 2.
        (2.0 - 2.0 * z * (-z).exp()) / (4.0 * z.powi(3))
    } else {
        let sech_half = 1.0 / (0.5 * z).cosh();
        (z.sinh() - z) * sech_half * sech_half / (4.0 * z.powi(3))
    }
}

/// Exact draw from PG(1, z). Symmetric in the sign of `z`.
pub fn sample_polya_gamma_1(z: f64, rng: &mut RngStream) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("PG(1, z) needs finite z, got {z}")));
    }
    let z = 0.5 * z.abs();
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let p_exp = mass_truncated_exponential(z, fz);

    loop {
        let x = if rng.uniform_open() < p_exp {
            let e: f64 = Exp1.sample(rng);
            TRUNC + e / fz
        } else {
            truncated_inverse_gaussian(z, rng)
        };

        let mut s = series_coefficient(0, x);
        let y = rng.uniform_open() * s;
        let mut n = 0usize;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coefficient(n, x);
                if y <= s {
                    return Ok(0.25 * x);
                }
            } else {
                s += series_coefficient(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// n-th term of the alternating series for the J*(1) density, using the
/// piecewise representation split at `TRUNC`.
fn series_coefficient(n: usize, x: f64) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    if x > TRUNC {
        k * (-0.5 * k * k * x).exp()
    } else if x > 0.0 {
        let h = n as f64 + 0.5;
        (-1.5 * ((0.5 * PI).ln() + x.ln()) + k.ln() - 2.0 * h * h / x).exp()
    } else {
        0.0
    }
}

/// Probability that the proposal comes from the exponential piece.
fn mass_truncated_exponential(z: f64, fz: f64) -> f64 {
    let root_t = TRUNC.sqrt();
    let b = (TRUNC * z - 1.0) / root_t;
    let a = -(TRUNC * z + 1.0) / root_t;
    let x0 = fz.ln() + fz * TRUNC;
    let xb = x0 - z + log_normal_cdf(b);
    let xa = x0 + z + log_normal_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Inverse Gaussian IG(1/z, 1) truncated to (0, TRUNC).
fn truncated_inverse_gaussian(z: f64, rng: &mut RngStream) -> f64 {
    let t = TRUNC;
    if z < TRUNC_RECIP {
        // Mean beyond the truncation point: sample 1/chi^2 restricted to
        // (0, t) and accept with the exponential tilt.
        loop {
            let (mut e1, mut e2): (f64, f64) = (Exp1.sample(rng), Exp1.sample(rng));
            while e1 * e1 > 2.0 * e2 / t {
                e1 = Exp1.sample(rng);
                e2 = Exp1.sample(rng);
            }
            let denom = 1.0 + e1 * t;
            let x = t / (denom * denom);
            let alpha = (-0.5 * z * z * x).exp();
            if rng.uniform_open() <= alpha {
                return x;
            }
        }
    } else {
        let mu = 1.0 / z;
        loop {
            let y = sample_standard_normal(rng);
            let y = y * y;
            let mu_y = mu * y;
            let mut x = mu + 0.5 * mu * mu_y - 0.5 * mu * (4.0 * mu_y + mu_y * mu_y).sqrt();
            if rng.uniform_open() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < t {
                return x;
            }
        }
    }
}

/// `ln Phi(x)`, accurate in the far left tail.
pub(crate) fn log_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        (0.5 * erfc(-x / SQRT_2)).ln()
    } else {
        // Mills ratio asymptotic expansion.
        let x2 = x * x;
        let log_pdf = -0.5 * x2 - 0.5 * (2.0 * PI).ln();
        let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
        log_pdf - (-x).ln() + series.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(z: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::new(seed);
        let (mut s, mut ss) = (0.0, 0.0);
        for _ in 0..n {
            let w = sample_polya_gamma_1(z, &mut rng).unwrap();
            assert!(w > 0.0 && w.is_finite());
            s += w;
            ss += w * w;
        }
        let m = s / n as f64;
        (m, ss / n as f64 - m * m)
    }

    #[test]
    fn mean_at_zero() {
        let (m, _) = moments(0.0, 1_000_000, 1);
        assert!((m / 0.25 - 1.0).abs() < 0.005, "mean {m}");
    }

    #[test]
    fn mean_at_two() {
        let expected = 1f64.tanh() / 4.0;
        assert!((expected - 0.190399).abs() < 1e-6);
        let (m, _) = moments(2.0, 1_000_000, 2);
        assert!((m / expected - 1.0).abs() < 0.005, "mean {m}");
    }

    #[test]
    fn large_argument_is_stable() {
        let (m, _) = moments(60.0, 100_000, 3);
        assert!((m / polya_gamma_1_mean(60.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn rejects_non_finite() {
        let mut rng = RngStream::new(0);
        assert!(matches!(sample_polya_gamma_1(f64::NAN, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(sample_polya_gamma_1(f64::INFINITY, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn log_normal_cdf_matches_both_branches() {
        assert!((log_normal_cdf(0.0) - 0.5f64.ln()).abs() < 1e-15);
        // Continuity across the switch to the asymptotic branch.
        let left = log_normal_cdf(-30.0 - 1e-9);
        let right = log_normal_cdf(-30.0 + 1e-9);
        assert!((left - right).abs() / left.abs() < 1e-9);
        assert!(log_normal_cdf(-200.0).is_finite());
    }
}
