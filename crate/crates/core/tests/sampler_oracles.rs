mod common;

use common::*;
use hsp_core::samplers::*;
use hsp_core::RngStream;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn inverse_gamma_mean_and_variance_within_three_se() {
    let n = 1_000_000;
    for (seed, (a, b)) in [(3.5, 2.0), (5.0, 1.0), (25.5, 3.0)].into_iter().enumerate() {
        let params = InverseGammaParams::new(a, b).unwrap();
        let mut rng = RngStream::new(100 + seed as u64);
        let xs: Vec<f64> = (0..n).map(|_| sample_inverse_gamma(params, &mut rng)).collect();
        let (m, v) = moments(&xs);
        let mean = b / (a - 1.0);
        let var = b * b / ((a - 1.0).powi(2) * (a - 2.0));
        let se_mean = (var / n as f64).sqrt();
        assert!((m - mean).abs() <= 3.0 * se_mean, "a={a}: mean {m} vs {mean}");
        // Variance SE from the fourth central moment, estimated from the draws.
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
        let se_var = ((m4 - v * v) / n as f64).sqrt();
        assert!((v - var).abs() <= 3.0 * se_var, "a={a}: var {v} vs {var}");
    }
}

#[test]
fn inverse_gamma_global_shape() {
    let shape = hsp_core::shrinkage::global_shape(10, 5);
    assert_eq!(shape, 25.5);
}

#[test]
fn inverse_gamma_half_median_matches_quadrature_oracle() {
    let oracle = inverse_gamma_median_oracle(0.5, 1.0);
    // Cross-check: 1 / qgamma(0.5, shape = 0.5, rate = 1) = 4.396.
    assert!((oracle - 4.396).abs() < 0.01, "oracle median {oracle}");
    let params = InverseGammaParams::new(0.5, 1.0).unwrap();
    let mut rng = RngStream::new(7);
    let xs: Vec<f64> = (0..1_000_000).map(|_| sample_inverse_gamma(params, &mut rng)).collect();
    assert!(xs.iter().all(|x| x.is_finite() && *x > 0.0));
    let med = median(&xs);
    assert!((med / oracle - 1.0).abs() < 0.01, "median {med} vs {oracle}");
}

#[test]
fn identity_precision_gives_standard_normal() {
    let g = PrecisionGaussian::new(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
    let mut rng = RngStream::new(11);
    let draws: Vec<DVector<f64>> = (0..1_000_000)
        .map(|_| sample_precision_gaussian(&g, &mut rng).unwrap())
        .collect();
    let (m, c) = sample_cov(&draws);
    assert!(m.amax() < 0.01);
    assert!((c.clone() - DMatrix::identity(2, 2)).amax() < 0.02, "{c}");
}

#[test]
fn random_spd_matches_dense_inverse_oracle() {
    let mut rng = RngStream::new(12);
    let p = random_spd(5, &mut rng);
    let h = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(StandardNormal));
    let cov = p.clone().try_inverse().unwrap();
    let mean = &cov * &h;

    let g = PrecisionGaussian::new(p, h).unwrap();
    let draws: Vec<DVector<f64>> = (0..1_000_000)
        .map(|_| sample_precision_gaussian(&g, &mut rng).unwrap())
        .collect();
    let (m, c) = sample_cov(&draws);
    for k in 0..5 {
        let sd = cov[(k, k)].sqrt();
        assert!((m[k] - mean[k]).abs() < 0.02 * sd, "mean[{k}] {} vs {}", m[k], mean[k]);
        for l in 0..5 {
            let scale = (cov[(k, k)] * cov[(l, l)]).sqrt();
            assert!((c[(k, l)] - cov[(k, l)]).abs() < 0.02 * scale, "cov[{k},{l}]");
        }
    }
}

#[test]
fn precision_route_and_covariance_route_agree_in_distribution() {
    let mut rng = RngStream::new(13);
    let p = random_spd(4, &mut rng);
    let h = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(StandardNormal));
    let cov = p.clone().try_inverse().unwrap();
    let mean = &cov * &h;
    let chol_cov = cov.cholesky().unwrap().unpack();

    let g = PrecisionGaussian::new(p, h).unwrap();
    let n = 100_000;
    let ours: Vec<DVector<f64>> = (0..n).map(|_| sample_precision_gaussian(&g, &mut rng).unwrap()).collect();
    let mut oracle_rng = RngStream::new(14);
    let oracle: Vec<DVector<f64>> = (0..n)
        .map(|_| {
            let z = DVector::from_fn(4, |_, _| oracle_rng.sample::<f64, _>(StandardNormal));
            &mean + &chol_cov * z
        })
        .collect();
    for k in 0..4 {
        let a: Vec<f64> = ours.iter().map(|x| x[k]).collect();
        let b: Vec<f64> = oracle.iter().map(|x| x[k]).collect();
        let d = ks_statistic(&a, &b);
        assert!(d < ks_critical_001(n, n), "marginal {k}: KS {d}");
    }
}

/// Truncated sum-of-gammas representation:
/// PG(1, z) = 1/(2 pi^2) sum_k g_k / ((k - 1/2)^2 + z^2 / (4 pi^2)), g_k ~ Exp(1).
fn pg_series_variance(z: f64, terms: usize) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    (1..=terms)
        .map(|k| {
            let c = (k as f64 - 0.5).powi(2) + z * z / (4.0 * pi2);
            1.0 / (4.0 * pi2 * pi2 * c * c)
        })
        .sum()
}

#[test]
fn polya_gamma_variance_at_five() {
    let analytic = polya_gamma_1_variance(5.0);
    let series = pg_series_variance(5.0, 200);
    assert!((analytic / series - 1.0).abs() < 1e-3, "analytic {analytic} vs series {series}");

    let mut rng = RngStream::new(21);
    let xs: Vec<f64> = (0..1_000_000).map(|_| sample_polya_gamma_1(5.0, &mut rng).unwrap()).collect();
    let (m, v) = moments(&xs);
    assert!((m / polya_gamma_1_mean(5.0) - 1.0).abs() < 0.005);
    assert!((v / analytic - 1.0).abs() < 0.02, "variance {v} vs {analytic}");
}

#[test]
fn polya_gamma_mean_at_zero_matches_series() {
    assert!((pg_series_variance(0.0, 100_000) - 1.0 / 24.0).abs() < 1e-6);
}

#[test]
fn polya_gamma_is_symmetric() {
    let n = 100_000;
    for z in [0.7, 3.0] {
        let mut r1 = RngStream::new(31);
        let mut r2 = RngStream::new(32);
        let a: Vec<f64> = (0..n).map(|_| sample_polya_gamma_1(z, &mut r1).unwrap()).collect();
        let b: Vec<f64> = (0..n).map(|_| sample_polya_gamma_1(-z, &mut r2).unwrap()).collect();
        let d = ks_statistic(&a, &b);
        assert!(d < ks_critical_001(n, n), "z={z}: KS {d}");
    }
}

#[test]
fn same_seed_reproduces_every_variate() {
    let ig = InverseGammaParams::new(2.0, 1.5).unwrap();
    let g = PrecisionGaussian::new(
        DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
        DVector::from_vec(vec![0.5, -1.0]),
    )
    .unwrap();
    let run = |seed: u64| {
        let mut rng = RngStream::new(seed);
        let mut out = Vec::new();
        for i in 0..500 {
            out.push(sample_inverse_gamma(ig, &mut rng));
            out.extend(sample_precision_gaussian(&g, &mut rng).unwrap().iter());
            out.push(sample_polya_gamma_1(i as f64 * 0.05 - 10.0, &mut rng).unwrap());
        }
        out
    };
    let a = run(99);
    let b = run(99);
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a, run(100));
}
