//! Densities of the ratio `u = aᵀx / aᵀh` and of `(u, t)` with `t = aᵀh`.

use std::f64::consts::PI;

use ndarray::ArrayView1;

use super::GeometryPoint;
use crate::error::{invalid, Error, Result};
use crate::linalg::norm;

/// Cauchy density of `u` with location `cos θ/ρ` and scale `sin θ/ρ`.
pub fn marginal_density_u(u: f64, pt: &GeometryPoint) -> f64 {
    let s = pt.sin_theta();
    let d = u * pt.rho - pt.cos_theta;
    pt.rho * s / (PI * (d * d + s * s))
}

/// Joint density of `(u, t)` for a signal `x` and error `h`.
#[derive(Debug, Clone, Copy)]
pub struct JointDensity {
    h_norm: f64,
    xh: f64,
    disc: f64,
}

impl JointDensity {
    pub fn new(x: ArrayView1<f64>, h: ArrayView1<f64>) -> Result<Self> {
        if x.len() != h.len() {
            return Err(Error::DimensionMismatch(format!("x has {} entries, h has {}", x.len(), h.len())));
        }
        let h_norm = norm(h);
        if h_norm == 0.0 {
            return Err(invalid("h must be nonzero"));
        }
        let xh = x.dot(&h);
        let x_norm = norm(x);
        let disc = (x_norm * h_norm).powi(2) - xh * xh;
        if !(disc > 1e-14 * (x_norm * h_norm).powi(2)) {
            return Err(invalid("x and h are collinear; the joint density is degenerate"));
        }
        Ok(Self { h_norm, xh, disc })
    }

    pub fn eval(&self, u: f64, t: f64) -> f64 {
        let d = u * self.h_norm - self.xh / self.h_norm;
        let k = d * d / self.disc + 1.0 / (self.h_norm * self.h_norm);
        (-k * t * t / 2.0).exp() * t.abs() / (2.0 * PI * self.disc.sqrt())
    }

    /// Centre of the `u` marginal, `xᵀh/‖h‖²`.
    pub fn u_centre(&self) -> f64 {
        self.xh / (self.h_norm * self.h_norm)
    }
}

pub fn joint_density_ut(u: f64, t: f64, x: ArrayView1<f64>, h: ArrayView1<f64>) -> Result<f64> {
    Ok(JointDensity::new(x, h)?.eval(u, t))
}
