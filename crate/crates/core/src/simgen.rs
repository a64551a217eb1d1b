//! Simulation scenarios: six predictor/modifier designs, optional AR(1)
//! correlation, high-dimensional and missing-response variants, and binary
//! responses.
//!
//! | setting | Z            | X            |
//! |---------|--------------|--------------|
//! | I       | N(0, 1)      | N(0, I_p)    |
//! | II      | Ber(0.5)     | N(0, I_p)    |
//! | III     | N(0, 1)      | N(0, Sigma)  |
//! | IV      | Ber(0.5)     | N(0, Sigma)  |
//! | V       | N(0, 1)      | Ber(0.5)     |
//! | VI      | Ber(0.5)     | Ber(0.5)     |
//!
//! `Sigma_ij = rho^|i-j|`. Binary columns are raw 0/1, never centred.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coefficients, Dataset, Family};
use crate::rng::RngStream;
use crate::samplers::sample_standard_normal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Setting {
    #[default]
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Setting {
    pub const ALL: [Setting; 6] = [Setting::I, Setting::II, Setting::III, Setting::IV, Setting::V, Setting::VI];

    pub fn binary_z(self) -> bool {
        matches!(self, Setting::II | Setting::IV | Setting::VI)
    }

    pub fn binary_x(self) -> bool {
        matches!(self, Setting::V | Setting::VI)
    }

    pub fn correlated_x(self) -> bool {
        matches!(self, Setting::III | Setting::IV)
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Setting::I => "I",
            Setting::II => "II",
            Setting::III => "III",
            Setting::IV => "IV",
            Setting::V => "V",
            Setting::VI => "VI",
        };
        f.write_str(s)
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Setting::I),
            "II" | "2" => Ok(Setting::II),
            "III" | "3" => Ok(Setting::III),
            "IV" | "4" => Ok(Setting::IV),
            "V" | "5" => Ok(Setting::V),
            "VI" | "6" => Ok(Setting::VI),
            other => Err(Error::Config(format!("unknown setting '{other}' (expected I..VI)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub setting: Setting,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// AR(1) correlation, used by the correlated settings only.
    pub rho_x: f64,
    pub missing_fraction: f64,
    pub interactions: bool,
    pub family: Family,
    pub n_test: usize,
    pub seed: u64,
    /// Standard deviation of the Gaussian noise.
    pub noise_sd: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            setting: Setting::I,
            n: 200,
            p: 10,
            q: 4,
            rho_x: 0.5,
            missing_fraction: 0.0,
            interactions: true,
            family: Family::Gaussian,
            n_test: 50,
            seed: 1,
            noise_sd: 1.0,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 || self.n_test == 0 {
            return Err(Error::Config("n, p and n_test must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.rho_x) {
            return Err(Error::Config(format!("rho_x must lie in [0, 1), got {}", self.rho_x)));
        }
        if !(0.0..1.0).contains(&self.missing_fraction) {
            return Err(Error::Config(format!(
                "missing_fraction must lie in [0, 1), got {}",
                self.missing_fraction
            )));
        }
        if self.family == Family::Binomial && self.missing_fraction > 0.0 {
            return Err(Error::Config(
                "missing responses are only simulated for the gaussian family".into(),
            ));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Config("noise_sd must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn n_missing(&self) -> usize {
        (self.missing_fraction * self.n as f64).round() as usize
    }
}

/// Generating coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTruth {
    pub coefficients: Coefficients,
}

impl SimTruth {
    /// `beta0 = 1`, `theta0 = -0.5`, `beta = (2, -2, 2, 2, 0, ...)`,
    /// `theta_1 = 1`, `theta_2 = -2`, `theta_3 = (1, 2, .., q)`, other rows 0.
    /// Without interactions `theta0` and every `theta_j` are zero.
    pub fn standard(p: usize, q: usize, interactions: bool) -> Self {
        let mut c = Coefficients::zeros(p, q);
        c.beta0 = 1.0;
        for (j, b) in [2.0, -2.0, 2.0, 2.0].into_iter().enumerate().take(p) {
            c.beta[j] = b;
        }
        if interactions {
            c.theta0.iter_mut().for_each(|t| *t = -0.5);
            let rows: [Box<dyn Fn(usize) -> f64>; 3] = [
                Box::new(|_| 1.0),
                Box::new(|_| -2.0),
                Box::new(|k| (k + 1) as f64),
            ];
            for (j, row) in rows.iter().enumerate().take(p) {
                for k in 0..q {
                    c.theta_row_mut(j)[k] = row(k);
                }
            }
        }
        Self { coefficients: c }
    }

    /// Main effects with a nonzero coefficient.
    pub fn support(&self) -> Vec<bool> {
        self.coefficients.beta.iter().map(|b| *b != 0.0).collect()
    }

    /// Nonzero pattern over `(beta_j, theta_j1, .., theta_jq)` for each j.
    pub fn full_support(&self) -> Vec<bool> {
        let c = &self.coefficients;
        (0..c.p())
            .flat_map(|j| {
                std::iter::once(c.beta[j] != 0.0).chain(c.theta_row(j).iter().map(|t| *t != 0.0))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub train: Dataset,
    pub test: Dataset,
    pub truth: SimTruth,
}

/// `Sigma_ij = rho^|i-j|`.
pub fn ar1_covariance(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32))
}

pub fn generate(spec: &SimSpec) -> Result<SimulatedData> {
    generate_with_rng(spec, &RngStream::new(spec.seed))
}

/// Train, test and mask use disjoint substreams of `rng`.
pub fn generate_with_rng(spec: &SimSpec, rng: &RngStream) -> Result<SimulatedData> {
    spec.validate()?;
    let truth = SimTruth::standard(spec.p, spec.q, spec.interactions);
    let x_chol = if spec.setting.correlated_x() && spec.rho_x > 0.0 {
        let sigma = ar1_covariance(spec.p, spec.rho_x);
        Some(
            sigma
                .cholesky()
                .ok_or_else(|| Error::Config("AR(1) covariance is not positive definite".into()))?
                .unpack(),
        )
    } else {
        None
    };

    let train = draw_dataset(spec, spec.n, &truth, x_chol.as_ref(), &mut rng.substream(1))?;
    let test = draw_dataset(spec, spec.n_test, &truth, x_chol.as_ref(), &mut rng.substream(2))?;

    let train = if spec.n_missing() > 0 {
        let mut mask_rng = rng.substream(3);
        let mut missing = vec![false; spec.n];
        for i in rand::seq::index::sample(&mut mask_rng, spec.n, spec.n_missing()) {
            missing[i] = true;
        }
        let y = train
            .y()
            .iter()
            .zip(&missing)
            .map(|(&y, &m)| if m { f64::NAN } else { y })
            .collect();
        train.with_response(y, missing)?
    } else {
        train
    };
    Ok(SimulatedData { train, test, truth })
}

fn draw_dataset(
    spec: &SimSpec,
    n: usize,
    truth: &SimTruth,
    x_chol: Option<&DMatrix<f64>>,
    rng: &mut RngStream,
) -> Result<Dataset> {
    let (p, q) = (spec.p, spec.q);
    let mut x = DMatrix::zeros(n, p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        for v in row.iter_mut() {
            *v = if spec.setting.binary_x() {
                bernoulli_half(rng)
            } else {
                sample_standard_normal(rng)
            };
        }
        for j in 0..p {
            x[(i, j)] = match x_chol {
                Some(l) => (0..=j).map(|k| l[(j, k)] * row[k]).sum(),
                None => row[j],
            };
        }
    }
    let mut z = DMatrix::zeros(n, q);
    for i in 0..n {
        for k in 0..q {
            z[(i, k)] = if spec.setting.binary_z() {
                bernoulli_half(rng)
            } else {
                sample_standard_normal(rng)
            };
        }
    }
    let eta = truth.coefficients.predict(&x, &z)?;
    let y = match spec.family {
        Family::Gaussian => eta
            .iter()
            .map(|e| e + spec.noise_sd * sample_standard_normal(rng))
            .collect(),
        Family::Binomial => eta
            .iter()
            .map(|e| {
                let prob = 1.0 / (1.0 + (-e).exp());
                if rng.random::<f64>() < prob {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
    };
    Dataset::observed(x, z, y, spec.family)
}

fn bernoulli_half(rng: &mut RngStream) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        0.0
    }
}
