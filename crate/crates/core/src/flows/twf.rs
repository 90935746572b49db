use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::check_iterate;
use crate::error::{invalid, Result};
use crate::linalg::norm;
use crate::problem::Measurements;

/// Truncation thresholds of the truncated Wirtinger flow baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwfParams {
    pub alpha_z_lb: f64,
    pub alpha_z_ub: f64,
    pub alpha_h: f64,
}

impl Default for TwfParams {
    fn default() -> Self {
        Self { alpha_z_lb: 0.3, alpha_z_ub: 5.0, alpha_h: 5.0 }
    }
}

impl TwfParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha_z_lb > 0.0 && self.alpha_z_lb < self.alpha_z_ub && self.alpha_h > 0.0;
        if !ok || !self.alpha_z_ub.is_finite() || !self.alpha_h.is_finite() {
            return Err(invalid(format!("invalid TWF thresholds {self:?}")));
        }
        Ok(())
    }
}

/// `(2/m) Σ ((pᵢ² − yᵢ)/pᵢ) aᵢ` over the measurements kept by both truncation events.
pub fn twf_gradient(meas: &Measurements, z: ArrayView1<f64>, params: &TwfParams) -> Result<Array1<f64>> {
    params.validate()?;
    let mut p = check_iterate(meas, z)?;
    let z_norm = norm(z);
    if z_norm == 0.0 {
        return Err(invalid("TWF gradient is undefined at z = 0"));
    }
    let y = meas.y();
    let k_t = p.iter().zip(y).map(|(pi, yi)| (yi - pi * pi).abs()).sum::<f64>() / meas.m() as f64;
    for (pi, &yi) in p.iter_mut().zip(y) {
        let lvl = pi.abs() / z_norm;
        let resid = pi.powi(2) - yi;
        let keep = lvl >= params.alpha_z_lb
            && lvl <= params.alpha_z_ub
            && resid.abs() <= params.alpha_h * k_t * lvl;
        *pi = if keep { resid / *pi } else { 0.0 };
    }
    Ok(meas.back_project(p.view(), 2.0 / meas.m() as f64))
}
