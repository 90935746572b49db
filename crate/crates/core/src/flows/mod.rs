//! Gradient rules.
//!
//! Every rule only sees the design matrix and the observations (through
//! [`Measurements`]) plus the current iterate; none of them can read the
//! signal. Each evaluates `p = A z`, forms a per-measurement residual and
//! returns `scale · Aᵀ r`.

mod likelihood;
mod reweighted;
mod tanh;
mod twf;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problem::Measurements;

pub use likelihood::{conditional_density, likelihood_gradient, likelihood_oracle_gradient, likelihood_target, log_cosh};
pub use reweighted::{rtanh_weights, rtanhwf_gradient, schedule_coefficient as rtanh_schedule, RtanhParams, RtanhVariant};
pub use tanh::{tanh_weight, tanhwf_gradient, TanhVariant};
pub use twf::{twf_gradient, TwfParams};

/// Relative width of the band around `|aᵀz| = √y` where the ratio statistic
/// is treated as infinite.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FlowRule {
    TanhWFL,
    TanhWFQ,
    RTanhWFL(RtanhParams),
    RTanhWF(RtanhParams),
    Twf(TwfParams),
    /// Likelihood gradient for a known correlation `sigma` and signal norm.
    LikelihoodOracle { sigma: f64, x_norm: f64 },
}

impl FlowRule {
    pub fn name(&self) -> &'static str {
        match self {
            FlowRule::TanhWFL => "tanhwfl",
            FlowRule::TanhWFQ => "tanhwfq",
            FlowRule::RTanhWFL(_) => "rtanhwfl",
            FlowRule::RTanhWF(_) => "rtanhwf",
            FlowRule::Twf(_) => "twf",
            FlowRule::LikelihoodOracle { .. } => "likelihood",
        }
    }

    /// Looks a rule up by name with default parameters.
    pub fn from_name(name: &str) -> Option<FlowRule> {
        Some(match name.to_ascii_lowercase().as_str() {
            "tanhwfl" => FlowRule::TanhWFL,
            "tanhwfq" => FlowRule::TanhWFQ,
            "rtanhwfl" => FlowRule::RTanhWFL(RtanhParams::default()),
            "rtanhwf" => FlowRule::RTanhWF(RtanhParams::default()),
            "twf" => FlowRule::Twf(TwfParams::default()),
            _ => return None,
        })
    }

    /// True for the reweighted rules, whose weights depend on the iteration.
    pub fn uses_iteration(&self) -> bool {
        matches!(self, FlowRule::RTanhWFL(_) | FlowRule::RTanhWF(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FlowRule::TanhWFL | FlowRule::TanhWFQ => Ok(()),
            FlowRule::RTanhWFL(p) | FlowRule::RTanhWF(p) => p.validate(),
            FlowRule::Twf(p) => p.validate(),
            FlowRule::LikelihoodOracle { sigma, x_norm } => {
                likelihood::check_sigma(*sigma)?;
                likelihood::check_norm(*x_norm, "x_norm")
            }
        }
    }

    /// Gradient at `z`; `t` is the 1-based iteration index.
    pub fn gradient(&self, meas: &Measurements, z: ArrayView1<f64>, t: usize) -> Result<Array1<f64>> {
        match *self {
            FlowRule::TanhWFL => tanhwf_gradient(TanhVariant::L, meas, z),
            FlowRule::TanhWFQ => tanhwf_gradient(TanhVariant::Q, meas, z),
            FlowRule::RTanhWFL(p) => rtanhwf_gradient(RtanhVariant::RTanhWFL, meas, z, t, &p),
            FlowRule::RTanhWF(p) => rtanhwf_gradient(RtanhVariant::RTanhWF, meas, z, t, &p),
            FlowRule::Twf(p) => twf_gradient(meas, z, &p),
            FlowRule::LikelihoodOracle { sigma, x_norm } => likelihood_oracle_gradient(meas, z, sigma, x_norm),
        }
    }
}

#[inline]
pub(crate) fn sgn(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The ratio `√y / (√y − |p|)` with its two special cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Ratio {
    /// `y = 0`: the statistic is defined as 0.
    Zero,
    /// `|p|` equals `√y` to within the guard band; the statistic is infinite.
    Saturated,
    /// Ordinary value, carried with its reciprocal `1 − |p|/√y`.
    Finite { stat: f64, inv: f64 },
}

#[inline]
pub(crate) fn ratio(sqrt_y: f64, abs_p: f64) -> Ratio {
    if sqrt_y == 0.0 {
        return Ratio::Zero;
    }
    let d = sqrt_y - abs_p;
    if d.abs() < SINGULAR_EPS * sqrt_y.max(1.0) {
        Ratio::Saturated
    } else {
        Ratio::Finite { stat: sqrt_y / d, inv: d / sqrt_y }
    }
}

pub(crate) fn check_iterate(meas: &Measurements, z: ArrayView1<f64>) -> Result<Array1<f64>> {
    meas.project(z)
}

pub(crate) fn check_t(t: usize) -> Result<()> {
    if t == 0 {
        return Err(invalid("iteration index is 1-based"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_cases() {
        assert_eq!(ratio(0.0, 3.0), Ratio::Zero);
        assert_eq!(ratio(2.0, 2.0), Ratio::Saturated);
        assert_eq!(ratio(2.0, 2.0 + 1e-13), Ratio::Saturated);
        assert_eq!(ratio(2.0, 1.0), Ratio::Finite { stat: 2.0, inv: 0.5 });
    }

    #[test]
    fn names_round_trip() {
        for name in ["tanhwfl", "tanhwfq", "rtanhwfl", "rtanhwf", "twf"] {
            assert_eq!(FlowRule::from_name(name).unwrap().name(), name);
        }
        assert!(FlowRule::from_name("wf").is_none());
        assert_eq!(sgn(0.0), 1.0);
        assert_eq!(sgn(-0.0), 1.0);
    }
}
