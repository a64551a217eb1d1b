//! Column centring and scaling of `X` and `Z`, with the exact map of fitted
//! coefficients back to the original units.

use serde::{Deserialize, Serialize};

use crate::draws::PosteriorDraws;
use crate::error::{Error, Result};
use crate::model::{Coefficients, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub x_center: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub z_center: Vec<f64>,
    pub z_scale: Vec<f64>,
}

/// Mean and population sd; constant columns keep scale 1.
fn column_stats(m: &nalgebra::DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows() as f64;
    m.column_iter()
        .map(|col| {
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if sd > 0.0 {
                (mean, sd)
            } else {
                (0.0, 1.0)
            }
        })
        .unzip()
}

impl Standardization {
    pub fn from_data(data: &Dataset) -> Self {
        let (x_center, x_scale) = column_stats(data.x());
        let (z_center, z_scale) = column_stats(data.z());
        Self {
            x_center,
            x_scale,
            z_center,
            z_scale,
        }
    }

    /// The dataset with standardized `X` and `Z`; the response is unchanged.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.p() != self.x_center.len() || data.q() != self.z_center.len() {
            return Err(Error::Shape("standardization fitted on a different shape".into()));
        }
        let x = data
            .x()
            .map_with_location(|_, j, v| (v - self.x_center[j]) / self.x_scale[j]);
        let z = data
            .z()
            .map_with_location(|_, k, v| (v - self.z_center[k]) / self.z_scale[k]);
        Dataset::new(x, z, data.y().to_vec(), data.missing().to_vec(), data.family())
    }

    /// Coefficients on the original scale giving the same linear predictor.
    pub fn back_transform(&self, c: &Coefficients) -> Coefficients {
        let (p, q) = (c.p(), c.q());
        let (m, s, cz, t) = (&self.x_center, &self.x_scale, &self.z_center, &self.z_scale);
        let mut out = Coefficients::zeros(p, q);
        let mut beta0 = c.beta0;
        for k in 0..q {
            out.theta0[k] = c.theta0[k] / t[k];
            beta0 -= c.theta0[k] * cz[k] / t[k];
        }
        for j in 0..p {
            let row = c.theta_row(j);
            let mut beta = c.beta[j] / s[j];
            beta0 -= c.beta[j] * m[j] / s[j];
            for k in 0..q {
                let w = row[k] / (s[j] * t[k]);
                out.theta_row_mut(j)[k] = w;
                beta -= w * cz[k];
                out.theta0[k] -= w * m[j];
                beta0 += w * m[j] * cz[k];
            }
            out.beta[j] = beta;
        }
        out.beta0 = beta0;
        out
    }

    /// Back-transforms every stored draw in place.
    pub fn back_transform_draws(&self, draws: &mut PosteriorDraws) {
        for s in 0..draws.n_stored {
            let c = self.back_transform(&draws.draw(s));
            draws.set_coefficients(s, &c);
        }
    }
}
