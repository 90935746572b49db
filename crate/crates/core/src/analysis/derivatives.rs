//! Time derivatives of `X(t) = ρ² t² f(x)` with `x = s/(tρ)` and `s` held fixed.

use super::case_weight::one_minus_tanh;

/// `sech² q`, written to stay finite for large `|q|`.
fn sech2(q: f64) -> f64 {
    let e = (-2.0 * q.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Exponent `q(x)` with its first two derivatives.
fn exponent_derivs(x: f64) -> (f64, f64, f64) {
    if !(0.0..=1.0).contains(&x) {
        (x * x - x, 2.0 * x - 1.0, 2.0)
    } else {
        let d = 2.0 * x - 1.0;
        let d2 = d * d;
        ((x * x - x) / d2, 1.0 / (d2 * d), -6.0 / (d2 * d2))
    }
}

/// `(∂X/∂t, ∂²X/∂t²)` at the point where `s/(tρ) = x_var`.
///
/// With `T = tanh q`, `S = sech² q`:
/// `∂X/∂t = tρ² (x(1 − T) + x² S q′)` and `∂²X/∂t² = ρ² x³ S (2T q′² − q″)`.
pub fn process_derivatives(x_var: f64, t: f64, rho: f64) -> (f64, f64) {
    let r2 = rho * rho;
    if x_var == 0.5 {
        // q → −∞: T = −1 and S vanishes faster than any power of q′
        return (t * r2, 0.0);
    }
    let (q, q1, q2) = exponent_derivs(x_var);
    let s = sech2(q);
    let omt = one_minus_tanh(q);
    if s == 0.0 {
        return (t * r2 * x_var * omt, 0.0);
    }
    let tq = q.tanh();
    let g = x_var * omt + x_var * x_var * s * q1;
    (t * r2 * g, r2 * x_var.powi(3) * s * (2.0 * tq * q1 * q1 - q2))
}
