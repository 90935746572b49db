//! Closed-form bounds on the expected tanh-weighted covariance and their
//! Monte-Carlo counterparts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mc::{mc_means, polar_gaussian, McEstimate};
use crate::error::{invalid, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBoundInputs {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SpectralBoundInputs {
    fn default() -> Self {
        Self { alpha: 4.0, beta: 1.0 }
    }
}

impl SpectralBoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("need alpha > 0 and beta >= 0, got {self:?}")));
        }
        Ok(())
    }
}

/// `β e^{−β²/2}/√(2π) · (1 − e^{−β²/α} (α/(2+α))^{3/2})`.
pub fn spectral_gap_lower_bound(inputs: &SpectralBoundInputs) -> Result<f64> {
    inputs.validate()?;
    let SpectralBoundInputs { alpha, beta } = *inputs;
    let lead = beta * (-beta * beta / 2.0).exp() / (2.0 * PI).sqrt();
    Ok(lead * (1.0 - (-beta * beta / alpha).exp() * (alpha / (2.0 + alpha)).powf(1.5)))
}

/// `1 − (α/(4+α))^{3/2}`.
pub fn spectral_lambda1_upper_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if alpha.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 - (alpha / (4.0 + alpha)).powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMc {
    pub gap: McEstimate,
    pub lambda1: McEstimate,
}

/// Samples `(r, φ)` from the planar Gaussian in polar form and averages
/// `r²(cos²φ − sin²φ) 𝟙(|r cos φ| > β) tanh(r² cos²φ/α)` (gap) and
/// `r² cos²φ 𝟙(|r cos φ| > β) tanh(r² cos²φ/α)` (largest eigenvalue).
pub fn spectral_expectation_mc(
    inputs: &SpectralBoundInputs,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<SpectralMc> {
    inputs.validate()?;
    if samples < 10_000 {
        return Err(invalid(format!("at least 10000 samples are required, got {samples}")));
    }
    let SpectralBoundInputs { alpha, beta } = *inputs;
    let [gap, lambda1] = mc_means(exec, samples, seed, |rng| {
        let (r, phi) = polar_gaussian(rng);
        let (c, s) = (phi.cos(), phi.sin());
        let along = r * c;
        if along.abs() > beta {
            let w = (along * along / alpha).tanh();
            let r2 = r * r;
            [r2 * (c * c - s * s) * w, r2 * c * c * w]
        } else {
            [0.0, 0.0]
        }
    });
    Ok(SpectralMc { gap, lambda1 })
}
