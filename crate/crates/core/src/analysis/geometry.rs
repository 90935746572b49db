use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::norm;

/// Relative error `ρ = ‖h‖/‖x‖` and angle `cos θ = xᵀh/(‖x‖‖h‖)` of an error vector `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryPoint {
    pub rho: f64,
    pub cos_theta: f64,
}

impl GeometryPoint {
    pub fn new(rho: f64, cos_theta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(invalid(format!("rho must lie in (0, 1], got {rho}")));
        }
        if !(cos_theta.abs() < 1.0) {
            return Err(invalid(format!("cos_theta must lie strictly inside (-1, 1), got {cos_theta}")));
        }
        Ok(Self { rho, cos_theta })
    }

    pub fn from_vectors(x: ArrayView1<f64>, h: ArrayView1<f64>) -> Result<Self> {
        if x.len() != h.len() {
            return Err(Error::DimensionMismatch(format!("x has {} entries, h has {}", x.len(), h.len())));
        }
        let (nx, nh) = (norm(x), norm(h));
        if nx == 0.0 || nh == 0.0 {
            return Err(invalid("x and h must be nonzero"));
        }
        Self::new(nh / nx, x.dot(&h) / (nx * nh))
    }

    pub fn sin_theta(&self) -> f64 {
        (1.0 - self.cos_theta * self.cos_theta).sqrt()
    }

    /// `(uρ − cos θ)/sin θ`, the Cauchy-standardized position of `u`.
    pub fn standardize(&self, u: f64) -> f64 {
        (u * self.rho - self.cos_theta) / self.sin_theta()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn validation_and_vectors() {
        assert!(GeometryPoint::new(0.0, 0.0).is_err());
        assert!(GeometryPoint::new(1.2, 0.0).is_err());
        assert!(GeometryPoint::new(0.5, 1.0).is_err());
        let p = GeometryPoint::from_vectors(array![1.0, 0.0].view(), array![0.3, 0.4].view()).unwrap();
        assert!((p.rho - 0.5).abs() < 1e-15 && (p.cos_theta - 0.6).abs() < 1e-15);
        assert!((p.sin_theta() - 0.8).abs() < 1e-15);
    }
}
