use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{check_iterate, ratio, sgn, Ratio};
use crate::error::Result;
use crate::problem::Measurements;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TanhVariant {
    /// `tanh(|w| − ½)`
    L,
    /// `tanh(w² − ¼)`
    Q,
}

pub fn tanh_weight(variant: TanhVariant, w: f64) -> f64 {
    match variant {
        TanhVariant::L => (w.abs() - 0.5).tanh(),
        TanhVariant::Q => (w * w - 0.25).tanh(),
    }
}

/// `(2/m) Σ aᵢ (pᵢ − sgn(pᵢ) √yᵢ · weight(wᵢ))` with `wᵢ = √yᵢ/(√yᵢ − |pᵢ|) − ½`.
pub fn tanhwf_gradient(variant: TanhVariant, meas: &Measurements, z: ArrayView1<f64>) -> Result<Array1<f64>> {
    let mut p = check_iterate(meas, z)?;
    for (pi, &yi) in p.iter_mut().zip(meas.y()) {
        let sy = yi.sqrt();
        let weight = match ratio(sy, pi.abs()) {
            Ratio::Zero => tanh_weight(variant, -0.5),
            Ratio::Saturated => 1.0,
            Ratio::Finite { stat, .. } => tanh_weight(variant, stat - 0.5),
        };
        *pi -= sgn(*pi) * sy * weight;
    }
    Ok(meas.back_project(p.view(), 2.0 / meas.m() as f64))
}
