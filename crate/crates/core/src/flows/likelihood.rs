use std::f64::consts::{LN_2, PI};

use ndarray::{Array1, ArrayView1};

use super::check_iterate;
use crate::error::{invalid, Result};
use crate::problem::Measurements;

/// `ln cosh v` without overflow.
pub fn log_cosh(v: f64) -> f64 {
    let a = v.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.abs() < 1.0) {
        return Err(invalid(format!("sigma must satisfy |sigma| < 1, got {sigma}")));
    }
    Ok(())
}

pub(crate) fn check_norm(v: f64, what: &str) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{what} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Negative log-likelihood of the iterate given correlation `sigma`:
///
/// `ln √(1−σ²) + 1/(2m(1−σ²)) Σ (σ² yᵢ/‖x‖² + fᵢ² − 2(1−σ²) ln cosh(σ fᵢ √yᵢ / ((1−σ²)‖x‖)))`
/// with `fᵢ = aᵢᵀz`.
pub fn likelihood_target(meas: &Measurements, z: ArrayView1<f64>, sigma: f64, x_norm: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_norm(x_norm, "x_norm")?;
    let p = check_iterate(meas, z)?;
    let q = 1.0 - sigma * sigma;
    let x2 = x_norm * x_norm;
    let sum: f64 = p
        .iter()
        .zip(meas.y())
        .map(|(&f, &y)| sigma * sigma * y / x2 + f * f - 2.0 * q * log_cosh(sigma * f * y.sqrt() / (q * x_norm)))
        .sum();
    Ok(0.5 * q.ln() + sum / (2.0 * meas.m() as f64 * q))
}

/// Gradient of [`likelihood_target`]:
/// `1/(m(1−σ²)) Σ (fᵢ − (σ√yᵢ/‖x‖) tanh(σ fᵢ √yᵢ / ((1−σ²)‖x‖))) aᵢ`.
pub fn likelihood_gradient(meas: &Measurements, z: ArrayView1<f64>, sigma: f64, x_norm: f64) -> Result<Array1<f64>> {
    check_sigma(sigma)?;
    check_norm(x_norm, "x_norm")?;
    let mut p = check_iterate(meas, z)?;
    let q = 1.0 - sigma * sigma;
    for (f, &y) in p.iter_mut().zip(meas.y()) {
        let sy = y.sqrt();
        *f -= sigma * sy / x_norm * (sigma * *f * sy / (q * x_norm)).tanh();
    }
    Ok(meas.back_project(p.view(), 1.0 / (meas.m() as f64 * q)))
}

/// The likelihood gradient written in signal-normalized coordinates,
/// `1/(m(1−σ²)) Σ (fᵢ − σ√yᵢ tanh(σ fᵢ √yᵢ / ((1−σ²)‖x‖²))) aᵢ`.
///
/// Agrees with [`likelihood_gradient`] when `‖x‖ = 1` and, unlike it, scales
/// linearly when `z`, `√y` and `‖x‖` are scaled together. This is the form
/// used when the likelihood gradient drives the optimizer.
pub fn likelihood_oracle_gradient(
    meas: &Measurements,
    z: ArrayView1<f64>,
    sigma: f64,
    x_norm: f64,
) -> Result<Array1<f64>> {
    check_sigma(sigma)?;
    check_norm(x_norm, "x_norm")?;
    let mut p = check_iterate(meas, z)?;
    let q = 1.0 - sigma * sigma;
    let x2 = x_norm * x_norm;
    for (f, &y) in p.iter_mut().zip(meas.y()) {
        let sy = y.sqrt();
        *f -= sigma * sy * (sigma * *f * sy / (q * x2)).tanh();
    }
    Ok(meas.back_project(p.view(), 1.0 / (meas.m() as f64 * q)))
}

/// Density of `f = aᵀz` given the amplitude `|aᵀx| = y_abs`.
pub fn conditional_density(f: f64, y_abs: f64, sigma: f64, x_norm: f64, z_norm: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_norm(x_norm, "x_norm")?;
    check_norm(z_norm, "z_norm")?;
    if !(y_abs >= 0.0) {
        return Err(invalid(format!("amplitude must be nonnegative, got {y_abs}")));
    }
    let q = 1.0 - sigma * sigma;
    let yx = y_abs / x_norm;
    let fz = f / z_norm;
    let log_p = -(sigma * sigma * yx * yx + fz * fz) / (2.0 * q) - 0.5 * (2.0 * PI * q).ln() - z_norm.ln()
        + log_cosh(sigma * fz * yx / q);
    Ok(log_p.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_instance;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn log_cosh_is_stable() {
        assert_eq!(log_cosh(0.0), 0.0);
        assert!((log_cosh(1.0) - 1f64.cosh().ln()).abs() < 1e-15);
        assert!((log_cosh(1e4) - (1e4 - LN_2)).abs() < 1e-9);
        assert_eq!(log_cosh(-3.0), log_cosh(3.0));
    }

    #[test]
    fn sigma_zero_collapses() {
        let inst = make_instance(3, 7, 4, 1.0).unwrap();
        let meas = inst.measurements();
        let z = array![0.3, -1.0, 0.5];
        let p = inst.a().dot(&z);
        let v = likelihood_target(&meas, z.view(), 0.0, 1.0).unwrap();
        assert!((v - p.mapv(|t| t * t).sum() / 14.0).abs() < 1e-13);
        assert_eq!(likelihood_target(&meas, Array1::zeros(3).view(), 0.0, 1.0).unwrap(), 0.0);
        let g = likelihood_gradient(&meas, z.view(), 0.0, 1.0).unwrap();
        let expected = inst.a().t().dot(&p) / 7.0;
        assert!((&g - &expected).iter().all(|d| d.abs() < 1e-13));
    }

    #[test]
    fn target_matches_direct_evaluation() {
        // m = 3 toy data evaluated with the textbook formula and ordinary cosh
        let a = array![[1.0, 0.5], [-0.3, 2.0], [0.7, -1.1]];
        let x = array![0.6, -0.8];
        let y = crate::problem::observe(a.view(), x.view()).unwrap();
        let meas = Measurements::new(a.view(), y.view()).unwrap();
        let z = array![0.2, 0.4];
        for &(sigma, xn) in &[(0.3, 1.0), (-0.6, 1.0), (0.8, 2.5)] {
            let q: f64 = 1.0 - sigma * sigma;
            let mut sum = 0.0;
            for i in 0..3 {
                let f: f64 = a.row(i).dot(&z);
                let yi: f64 = y[i];
                sum += sigma * sigma * yi / (xn * xn) + f * f
                    - 2.0 * q * (sigma * f * yi.sqrt() / (q * xn)).cosh().ln();
            }
            let direct = q.sqrt().ln() + sum / (6.0 * q);
            let v = likelihood_target(&meas, z.view(), sigma, xn).unwrap();
            assert!((v - direct).abs() < 1e-14 * direct.abs().max(1.0), "{v} vs {direct}");
        }
    }

    #[test]
    fn rejects_out_of_range_sigma() {
        let inst = make_instance(2, 3, 1, 1.0).unwrap();
        let meas = inst.measurements();
        assert!(likelihood_target(&meas, inst.x(), 1.0, 1.0).is_err());
        assert!(likelihood_gradient(&meas, inst.x(), -1.2, 1.0).is_err());
        assert!(conditional_density(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(likelihood_gradient(&meas, inst.x(), 0.5, 0.0).is_err());
    }

    #[test]
    fn near_unit_sigma_stays_finite() {
        let inst = make_instance(6, 20, 8, 1.0).unwrap();
        let g = likelihood_gradient(&inst.measurements(), inst.x(), 1.0 - 1e-6, 1.0).unwrap();
        assert!(g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn oracle_form_matches_at_unit_norm() {
        let inst = make_instance(5, 20, 3, 1.0).unwrap();
        let meas = inst.measurements();
        let z = array![0.1, 0.2, -0.3, 0.4, 0.0];
        let a = likelihood_gradient(&meas, z.view(), 0.4, 1.0).unwrap();
        let b = likelihood_oracle_gradient(&meas, z.view(), 0.4, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn density_reduces_to_gaussian() {
        let v = conditional_density(0.7, 1.3, 0.0, 1.0, 2.0).unwrap();
        let gauss = (-0.7f64 * 0.7 / 8.0).exp() / ((2.0 * PI).sqrt() * 2.0);
        assert!((v - gauss).abs() < 1e-15);
        let big = conditional_density(1e3, 50.0, 0.9, 1.0, 1.0).unwrap();
        assert!(big.is_finite());
    }


    proptest! {
        #[test]
        fn density_is_even(f in -8.0f64..8.0, y in 0.0f64..5.0, s in -0.95f64..0.95) {
            let a = conditional_density(f, y, s, 1.2, 0.8).unwrap();
            prop_assert_eq!(a, conditional_density(-f, y, s, 1.2, 0.8).unwrap());
        }
    }
}
