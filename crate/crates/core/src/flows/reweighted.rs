use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{check_iterate, check_t, ratio, sgn, Ratio};
use crate::error::{invalid, Result};
use crate::problem::Measurements;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RtanhVariant {
    RTanhWFL,
    /// Same gradient weight `g`, amplitude weight `f` fixed to 1.
    RTanhWF,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtanhParams {
    /// Decay constant of the weight schedules.
    pub t_decay: f64,
    pub w_f: f64,
    pub w_g: f64,
    pub b: f64,
}

impl Default for RtanhParams {
    fn default() -> Self {
        Self { t_decay: 1200.0, w_f: 0.9, w_g: 1.0, b: 0.25 }
    }
}

impl RtanhParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_decay > 0.0) {
            return Err(invalid(format!("T must be positive, got {}", self.t_decay)));
        }
        for (name, v) in [("w_f", self.w_f), ("w_g", self.w_g)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(invalid(format!("b must be nonnegative, got {}", self.b)));
        }
        Ok(())
    }
}

/// `1 − w₀ e^{−t/T}`.
pub fn schedule_coefficient(w0: f64, t: f64, t_decay: f64) -> f64 {
    1.0 - w0 * (-t / t_decay).exp()
}

fn g_weight(coef: f64, inv: f64) -> f64 {
    // inv = 1/x_stat; infinite when y = 0
    if coef == 0.0 {
        return 0.0;
    }
    let d = inv - 1.0;
    (coef * d * d).tanh()
}

/// `(f, g)` at the ratio statistic `x_stat` and iteration `t`.
pub fn rtanh_weights(x_stat: f64, t: usize, params: &RtanhParams) -> (f64, f64) {
    let inv = if x_stat == 0.0 { f64::INFINITY } else { 1.0 / x_stat };
    weights(x_stat, inv, t, params)
}

fn weights(x_stat: f64, inv: f64, t: usize, params: &RtanhParams) -> (f64, f64) {
    let cf = schedule_coefficient(params.w_f, t as f64, params.t_decay);
    let cg = schedule_coefficient(params.w_g, t as f64, params.t_decay);
    let f = if x_stat.is_infinite() { 1.0 } else { (cf * (x_stat.abs() + params.b)).tanh() };
    (f, g_weight(cg, inv))
}

/// `(2/m) Σ gᵢ aᵢ (pᵢ − sgn(pᵢ) √yᵢ fᵢ)`.
pub fn rtanhwf_gradient(
    variant: RtanhVariant,
    meas: &Measurements,
    z: ArrayView1<f64>,
    t: usize,
    params: &RtanhParams,
) -> Result<Array1<f64>> {
    check_t(t)?;
    params.validate()?;
    let mut p = check_iterate(meas, z)?;
    for (pi, &yi) in p.iter_mut().zip(meas.y()) {
        let sy = yi.sqrt();
        let (f, g) = match ratio(sy, pi.abs()) {
            Ratio::Zero => weights(0.0, f64::INFINITY, t, params),
            Ratio::Saturated => weights(f64::INFINITY, 0.0, t, params),
            Ratio::Finite { stat, inv } => weights(stat, inv, t, params),
        };
        let f = match variant {
            RtanhVariant::RTanhWFL => f,
            RtanhVariant::RTanhWF => 1.0,
        };
        *pi = g * (*pi - sgn(*pi) * sy * f);
    }
    Ok(meas.back_project(p.view(), 2.0 / meas.m() as f64))
}
