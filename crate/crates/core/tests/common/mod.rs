#![allow(dead_code)]

use hsp_core::{Dataset, Family, RngStream};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, v)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Composite Simpson rule on `[a, b]` with `2m` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// CDF of IG(shape, rate) by quadrature. `X <= x` iff `G >= rate / x` for
/// `G ~ Gamma(shape, 1)`; with `g = s^2` the gamma density becomes the
/// smooth integrand `2 s^(2a-1) exp(-s^2)`.
pub fn inverse_gamma_cdf_quadrature(shape: f64, rate: f64, x: f64) -> f64 {
    let f = |s: f64| 2.0 * s.powf(2.0 * shape - 1.0) * (-s * s).exp();
    let upper = 12.0;
    let total = simpson(f, 0.0, upper, 20_000);
    let s0 = (rate / x).sqrt();
    if s0 >= upper {
        return 0.0;
    }
    simpson(f, s0, upper, 20_000) / total
}

/// Median of IG(shape, rate) by bisection on the quadrature CDF.
pub fn inverse_gamma_median_oracle(shape: f64, rate: f64) -> f64 {
    let (mut lo, mut hi) = (1e-8_f64, 1e8_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if inverse_gamma_cdf_quadrature(shape, rate, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// KS critical value at alpha = 0.001.
pub fn ks_critical_001(n: usize, m: usize) -> f64 {
    1.949 * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_spd(d: usize, rng: &mut RngStream) -> DMatrix<f64> {
    let a = random_matrix(d, d, rng);
    &a * a.transpose() + DMatrix::identity(d, d) * 0.5
}

pub fn random_dataset(n: usize, p: usize, q: usize, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed);
    let x = random_matrix(n, p, &mut rng);
    let z = random_matrix(n, q, &mut rng);
    let y = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Dataset::observed(x, z, y, Family::Gaussian).unwrap()
}

/// Naive double loop for the pliable predictor.
pub fn naive_eta(
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    beta0: f64,
    theta0: &[f64],
    beta: &[f64],
    theta: &[f64],
) -> Vec<f64> {
    let (n, p, q) = (x.nrows(), x.ncols(), z.ncols());
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut e = beta0;
        for k in 0..q {
            e += z[(i, k)] * theta0[k];
        }
        for j in 0..p {
            let mut eff = beta[j];
            for k in 0..q {
                eff += z[(i, k)] * theta[j * q + k];
            }
            e += x[(i, j)] * eff;
        }
        out[i] = e;
    }
    out
}

/// Conjugate Gaussian posterior with dense inverse: prior N(0, diag(prior_var)),
/// likelihood N(W b, sigma^2 I) on response `r`.
pub fn dense_conjugate(w: &DMatrix<f64>, r: &[f64], sigma_sq: f64, prior_var: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let d = w.ncols();
    let mut prec = w.transpose() * w / sigma_sq;
    for k in 0..d {
        prec[(k, k)] += 1.0 / prior_var[k];
    }
    let cov = prec.try_inverse().expect("invertible");
    let mean = &cov * (w.transpose() * DVector::from_column_slice(r)) / sigma_sq;
    (mean, cov)
}

pub fn sample_cov(draws: &[DVector<f64>]) -> (DVector<f64>, DMatrix<f64>) {
    let d = draws[0].len();
    let n = draws.len() as f64;
    let mut m = DVector::zeros(d);
    for x in draws {
        m += x;
    }
    m /= n;
    let mut c = DMatrix::zeros(d, d);
    for x in draws {
        let dx = x - &m;
        c += &dx * dx.transpose();
    }
    (m, c / n)
}
