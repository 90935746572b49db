//! Expectation of the curvature term `X = t² f(u)`, normalized by `‖h‖²`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::case_weight::case_weight_f;
use super::mc::{mc_means, normal_pair, McEstimate};
use super::quad::integrate;
use super::GeometryPoint;
use crate::error::{invalid, Result};
use crate::exec::Execution;

/// Absolute tolerance used for the curvature integral.
pub const QUAD_TOL: f64 = 1e-10;

/// `E(X)/‖h‖² = ∫ f(u) · 2 sin³θ ρ / (π((uρ − cos θ)² + sin²θ)²) du`.
///
/// With `uρ = cos θ + sin θ tan φ` the weight becomes `(2/π) cos² φ` on
/// `(−π/2, π/2)`; the range is split where `u` crosses 0, ½ and 1.
pub fn curvature_expectation_quad(pt: &GeometryPoint) -> Result<f64> {
    let (c, s, rho) = (pt.cos_theta, pt.sin_theta(), pt.rho);
    let g = |phi: f64| {
        let cp = phi.cos();
        case_weight_f((c + s * phi.tan()) / rho) * cp * cp
    };
    let mut cuts = vec![-FRAC_PI_2];
    cuts.extend([0.0, 0.5, 1.0].map(|u| pt.standardize(u).atan()));
    cuts.push(FRAC_PI_2);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(g, w[0], w[1], QUAD_TOL / 4.0)?.value;
    }
    Ok(2.0 / PI * total)
}

/// Monte-Carlo estimate of `E(X)/‖h‖²` from `N` correlated Gaussian pairs
/// `(aᵀx, aᵀh)` with `‖x‖ = 1`, `‖h‖ = ρ`.
pub fn curvature_expectation_mc(pt: &GeometryPoint, samples: usize, seed: u64, exec: Execution) -> Result<McEstimate> {
    if samples < 1000 {
        return Err(invalid(format!("at least 1000 samples are required, got {samples}")));
    }
    let (c, s, rho) = (pt.cos_theta, pt.sin_theta(), pt.rho);
    let [est] = mc_means(exec, samples, seed, |rng| {
        let (g1, g2) = normal_pair(rng);
        let t = rho * g1;
        let sx = c * g1 + s * g2;
        [curvature_sample(sx, t) / (rho * rho)]
    });
    Ok(est)
}

/// One draw of `X = t² f(s/t)` (zero when `t = 0`).
#[inline]
pub fn curvature_sample(s: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * t * case_weight_f(s / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sup_case_weight;

    #[test]
    fn bounded_by_supremum_and_below_one_near_the_signal() {
        let sup = sup_case_weight().value;
        for (r, c) in [(0.1, 0.0), (0.5, 0.9), (1.0, -0.99), (0.02, 0.5)] {
            let v = curvature_expectation_quad(&GeometryPoint::new(r, c).unwrap()).unwrap();
            assert!(v <= sup, "{v}");
        }
        let v = curvature_expectation_quad(&GeometryPoint::new(0.1, 0.0).unwrap()).unwrap();
        assert!(v < 1.0);
    }

    #[test]
    fn quadrature_matches_direct_u_integral() {
        use crate::analysis::density::marginal_density_u;
        use crate::analysis::quad::integrate_real_line;
        let pt = GeometryPoint::new(0.6, 0.3).unwrap();
        // weight in u is 2 sin²θ/((uρ − c)² + sin²θ) times the Cauchy density
        let s2 = 1.0 - 0.09;
        let w = |u: f64| {
            let d = u * 0.6 - 0.3;
            case_weight_f(u) * 2.0 * s2 / (d * d + s2) * marginal_density_u(u, &pt)
        };
        let direct = integrate_real_line(w, 0.5, 1e-10).unwrap().value;
        assert!((direct - curvature_expectation_quad(&pt).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn mc_agrees_and_is_deterministic() {
        let pt = GeometryPoint::new(0.5, 0.2).unwrap();
        let q = curvature_expectation_quad(&pt).unwrap();
        let m = curvature_expectation_mc(&pt, 200_000, 3, Execution::default()).unwrap();
        assert!((m.estimate - q).abs() < 4.0 * m.std_error, "{q} vs {m:?}");
        assert_eq!(m, curvature_expectation_mc(&pt, 200_000, 3, Execution::Sequential).unwrap());
        assert!(curvature_expectation_mc(&pt, 10, 3, Execution::default()).is_err());
    }
}
