mod common;

use common::*;
use hsp_core::metrics::{estimation_errors, prediction_error, selection_metrics};
use hsp_core::simgen::{ar1_covariance, generate, SimSpec, SimTruth, Setting};
use hsp_core::summary::{autocorrelation_of, interval_of, interval_selects, Acf};
use hsp_core::{Coefficients, Dataset, Family, RngStream};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn setting_one_generator_moments() {
    let sim = generate(&SimSpec { n: 10_000, seed: 1, ..Default::default() }).unwrap();
    let x = sim.train.x();
    let z = sim.train.z();
    for j in 0..10 {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        let (m, v) = moments(&col);
        assert!(m.abs() < 0.05 && (v - 1.0).abs() < 0.1, "x{j}: {m} {v}");
    }
    for k in 0..4 {
        let col: Vec<f64> = z.column(k).iter().copied().collect();
        let (m, v) = moments(&col);
        assert!(m.abs() < 0.05 && (v - 1.0).abs() < 0.1, "z{k}: {m} {v}");
    }
    assert!(lag_one_correlation(x).abs() < 0.05);
    let correlated = generate(&SimSpec { setting: Setting::III, n: 10_000, ..Default::default() }).unwrap();
    assert!((lag_one_correlation(correlated.train.x()) - 0.5).abs() < 0.05);
}

fn lag_one_correlation(x: &DMatrix<f64>) -> f64 {
    let n = x.nrows() as f64;
    x.column(0).iter().zip(x.column(1).iter()).map(|(u, v)| u * v).sum::<f64>() / n
}

#[test]
fn setting_six_is_binary() {
    let sim = generate(&SimSpec { setting: Setting::VI, n: 300, ..Default::default() }).unwrap();
    for d in [&sim.train, &sim.test] {
        assert!(d.x().iter().chain(d.z().iter()).all(|v| *v == 0.0 || *v == 1.0));
    }
}

#[test]
fn noiseless_response_equals_naive_predictor() {
    let sim = generate(&SimSpec { n: 100, noise_sd: 0.0, ..Default::default() }).unwrap();
    let c = &sim.truth.coefficients;
    let oracle = naive_eta(sim.train.x(), sim.train.z(), c.beta0, &c.theta0, &c.beta, &c.theta);
    for (y, e) in sim.train.y().iter().zip(&oracle) {
        assert!((y - e).abs() <= 1e-12 * (1.0 + e.abs()));
    }
}

#[test]
fn truth_matches_standard_design() {
    let t = SimTruth::standard(10, 4, true).coefficients;
    assert_eq!(t.beta0, 1.0);
    assert_eq!(t.theta0, vec![-0.5; 4]);
    assert_eq!(t.beta, vec![2.0, -2.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(t.theta_row(0), &[1.0; 4]);
    assert_eq!(t.theta_row(1), &[-2.0; 4]);
    assert_eq!(t.theta_row(2), &[1.0, 2.0, 3.0, 4.0]);
    assert!(t.theta[12..].iter().all(|v| *v == 0.0));
    let flat = SimTruth::standard(10, 4, false).coefficients;
    assert!(flat.theta.iter().chain(&flat.theta0).all(|v| *v == 0.0));
}

#[test]
fn same_seed_same_data_and_disjoint_test_stream() {
    let spec = SimSpec { n: 50, missing_fraction: 0.3, seed: 9, ..Default::default() };
    let a = generate(&spec).unwrap();
    let b = generate(&spec).unwrap();
    assert_eq!(a.train.x(), b.train.x());
    assert_eq!(a.train.missing(), b.train.missing());
    assert_eq!(a.train.n_missing(), 15);
    assert_ne!(a.train.x().rows(0, 1), a.test.x().rows(0, 1));
}

#[test]
fn ar1_is_positive_definite() {
    for rho in [0.0, 0.3, 0.9, 0.99] {
        assert!(ar1_covariance(20, rho).cholesky().is_some());
    }
}

#[test]
fn estimation_errors_match_loop_oracle() {
    let mut rng = RngStream::new(3);
    let mut draw = |k: usize| (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<f64>>();
    let est = Coefficients::from_parts(0.1, draw(3), draw(6), draw(18)).unwrap();
    let truth = SimTruth { coefficients: Coefficients::from_parts(0.0, draw(3), draw(6), draw(18)).unwrap() };
    let (eb, et) = estimation_errors(&est, &truth).unwrap();
    let mut ob = 0.0;
    for j in 0..6 {
        ob += (est.beta[j] - truth.coefficients.beta[j]).powi(2);
    }
    let mut ot = 0.0;
    for j in 0..6 {
        for k in 0..3 {
            ot += (est.theta_row(j)[k] - truth.coefficients.theta_row(j)[k]).powi(2);
        }
    }
    assert!((eb - ob).abs() < 1e-12 && (et - ot).abs() < 1e-12);

    let mut shifted = truth.coefficients.clone();
    shifted.beta[0] += 1.0;
    assert_eq!(estimation_errors(&shifted, &truth).unwrap(), (1.0, 0.0));
}

#[test]
fn prediction_error_cases() {
    let x = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
    let test = Dataset::observed(x.clone(), DMatrix::zeros(4, 0), vec![1.0, 2.0, 3.0, 4.0], Family::Gaussian).unwrap();
    assert_eq!(prediction_error(test.y(), &test).unwrap(), 0.0);
    let off: Vec<f64> = test.y().iter().map(|y| y + 0.5).collect();
    assert!((prediction_error(&off, &test).unwrap() - 0.25).abs() < 1e-15);
    let bin = Dataset::observed(x, DMatrix::zeros(4, 0), vec![1.0, 0.0, 1.0, 0.0], Family::Binomial).unwrap();
    assert_eq!(prediction_error(&[0.9, 0.2, 0.4, 0.6], &bin).unwrap(), 0.5);
    assert!(prediction_error(&[0.1], &bin).is_err());
}

#[test]
fn selection_metric_cases() {
    let truth = SimTruth::standard(10, 4, true).support();
    let all = selection_metrics(&[true; 10], &truth).unwrap();
    assert_eq!((all.tp, all.fp), (4, 6));
    assert_eq!((all.accuracy(), all.fdr(), all.fpr()), (0.4, 0.6, 1.0));
    let none = selection_metrics(&[false; 10], &truth).unwrap();
    assert_eq!((none.tp, none.fdr(), none.fpr(), none.accuracy()), (0, 0.0, 0.0, 0.6));
    let exact = selection_metrics(&truth, &truth).unwrap();
    assert_eq!((exact.accuracy(), exact.fdr(), exact.fpr()), (1.0, 0.0, 0.0));
}

#[test]
fn normal_chain_interval_matches_quantiles() {
    let mut rng = RngStream::new(5);
    let chain: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
    let ci = interval_of(&chain, 0.95).unwrap();
    assert!((ci.lower + 1.96).abs() < 0.03 && (ci.upper - 1.96).abs() < 0.03, "{ci:?}");
    assert!(!ci.excludes_zero());
}

#[test]
fn integer_chain_interval() {
    let chain: Vec<f64> = (1..=100).map(f64::from).collect();
    let ci = interval_of(&chain, 0.95).unwrap();
    assert!((ci.lower - 3.475).abs() < 1e-12 && (ci.upper - 97.525).abs() < 1e-12);
    assert!(interval_of(&chain, 1.0).is_err());
}

#[test]
fn ar1_chain_autocorrelation() {
    let mut rng = RngStream::new(6);
    let mut x = 0.0;
    let chain: Vec<f64> = (0..50_000)
        .map(|_| {
            x = 0.8 * x + rng.sample::<f64, _>(StandardNormal);
            x
        })
        .collect();
    let acf = autocorrelation_of(&chain, 5);
    let v = acf.values().unwrap();
    assert_eq!(v[0], 1.0);
    assert!((v[1] - 0.8).abs() < 0.05, "{}", v[1]);
}

#[test]
fn white_noise_autocorrelation_band() {
    let mut rng = RngStream::new(7);
    let n = 5000;
    let chain: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let acf = autocorrelation_of(&chain, 100);
    let v = acf.values().unwrap();
    let band = 3.0 / (n as f64).sqrt();
    let inside = v[1..].iter().filter(|a| a.abs() <= band).count();
    assert!(inside as f64 >= 0.95 * 100.0);
}

#[test]
fn constant_chain_is_degenerate_and_never_selected() {
    assert_eq!(autocorrelation_of(&[2.0; 50], 5), Acf::Degenerate);
    assert!(!interval_selects(&[2.0; 50], 0.95).unwrap());
}

proptest! {
    #[test]
    fn narrower_interval_is_nested(chain in prop::collection::vec(-50.0f64..50.0, 2..200)) {
        let wide = interval_of(&chain, 0.95).unwrap();
        let narrow = interval_of(&chain, 0.90).unwrap();
        prop_assert!(wide.contains(&narrow));
        prop_assert!(wide.lower <= wide.upper);
    }

    #[test]
    fn selection_is_scale_invariant(chain in prop::collection::vec(-5.0f64..20.0, 5..100), c in 0.01f64..100.0) {
        let scaled: Vec<f64> = chain.iter().map(|v| v * c).collect();
        prop_assert_eq!(interval_selects(&chain, 0.95).unwrap(), interval_selects(&scaled, 0.95).unwrap());
    }

    #[test]
    fn rates_are_bounded(sel in prop::collection::vec(any::<bool>(), 10), truth in prop::collection::vec(any::<bool>(), 10)) {
        let c = selection_metrics(&sel, &truth).unwrap();
        prop_assert_eq!(c.tp + c.fp + c.fn_ + c.tn, 10);
        for r in [c.accuracy(), c.fdr(), c.fpr()] {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn theta_error_ignores_storage_order(vals in prop::collection::vec(-3.0f64..3.0, 12)) {
        let truth = SimTruth { coefficients: Coefficients::zeros(4, 3) };
        let est = Coefficients::from_parts(0.0, vec![0.0; 3], vec![0.0; 4], vals.clone()).unwrap();
        let mut transposed = vec![0.0; 12];
        for j in 0..4 { for k in 0..3 { transposed[k * 4 + j] = vals[j * 3 + k]; } }
        let t2 = SimTruth { coefficients: Coefficients::zeros(3, 4) };
        let est2 = Coefficients::from_parts(0.0, vec![0.0; 4], vec![0.0; 3], transposed).unwrap();
        let a = estimation_errors(&est, &truth).unwrap().1;
        let b = estimation_errors(&est2, &t2).unwrap().1;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
