//! Dyadic upper bounds for the curvature expectation.
//!
//! The `u` axis is cut at points `uₙ` where the exponent of the case weight
//! takes the values `±2ⁿ`. On each piece `f(u)` is bounded by a constant and
//! the remaining weight integrates in closed form: with `a = (uρ − cos θ)/sin θ`,
//! `∫ 2/(π(1+a²)²) da = W(a)/π` where `W(a) = a/(1+a²) + arctan a`.
//!
//! Outside `[n_min, n_max]` each branch is closed off by a cap that is
//! itself a valid bound, so [`dyadic_upper_bound`] never drops mass.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::GeometryPoint;
use crate::error::{invalid, Result};
use crate::exec::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DyadicBranch {
    /// `u > 1`, `uₙ = (1 + √(2ⁿ⁺² + 1))/2`.
    AboveOne,
    /// `u < 0`, `uₙ = (1 − √(2ⁿ⁺² + 1))/2`.
    Negative,
    /// `0 < u < ½`, `uₙ = ½ − 1/(2√(1 + 2ⁿ⁺²))`.
    LowerInterior,
    /// `½ < u < 1`, `uₙ = ½ + 1/(2√(1 + 2ⁿ⁺²))`.
    UpperInterior,
}

impl DyadicBranch {
    pub const ALL: [DyadicBranch; 4] =
        [DyadicBranch::AboveOne, DyadicBranch::Negative, DyadicBranch::LowerInterior, DyadicBranch::UpperInterior];

    pub fn point(self, n: i32) -> f64 {
        let r = (2f64.powi(n + 2) + 1.0).sqrt();
        match self {
            DyadicBranch::AboveOne => (1.0 + r) / 2.0,
            DyadicBranch::Negative => (1.0 - r) / 2.0,
            DyadicBranch::LowerInterior => 0.5 - 0.5 / r,
            DyadicBranch::UpperInterior => 0.5 + 0.5 / r,
        }
    }
}

pub fn w_antiderivative(a: f64) -> f64 {
    a / (1.0 + a * a) + a.atan()
}

/// `(coef/π)·(W(a(hi)) − W(a(lo)))`: bound for the piece `[lo, hi]` when `f ≤ coef` on it.
fn piece(pt: &GeometryPoint, coef: f64, lo: f64, hi: f64) -> f64 {
    coef / PI * (w_antiderivative(pt.standardize(hi)) - w_antiderivative(pt.standardize(lo)))
}

/// Bound on the contribution of the `n`-th piece of `branch`.
pub fn dyadic_term(branch: DyadicBranch, n: i32, pt: &GeometryPoint) -> f64 {
    let (un, prev) = (branch.point(n), branch.point(n - 1));
    let tn = 2f64.powi(n).tanh();
    match branch {
        DyadicBranch::AboveOne => piece(pt, (1.0 - 2f64.powi(n - 1).tanh()) * un, prev, un),
        DyadicBranch::Negative => piece(pt, (1.0 - tn) * prev, un, prev),
        DyadicBranch::LowerInterior => piece(pt, (1.0 + tn) * un, prev, un),
        DyadicBranch::UpperInterior => piece(pt, (1.0 + tn) * prev, un, prev),
    }
}

/// Caps closing each branch outside `[n_min, n_max]`.
fn caps(pt: &GeometryPoint, n_min: i32, n_max: i32) -> f64 {
    use DyadicBranch::*;
    let below = n_min - 1;
    let t_below = 1.0 + 2f64.powi(below).tanh();
    let a_lo = AboveOne.point(below);
    // 1 − tanh v ≤ 2e^{−2v} and ∫_U^∞ 2u e^{−2(u²−u)} du ≤ e^{−2(U²−U)}
    let above_tail = 2.0 * pt.rho / (PI * pt.sin_theta()) * (-(2f64.powi(n_max + 1))).exp();
    piece(pt, a_lo, 1.0, a_lo)
        + above_tail
        + piece(pt, t_below * LowerInterior.point(below), 0.0, LowerInterior.point(below))
        + piece(pt, 1.0, LowerInterior.point(n_max), 0.5)
        + piece(pt, 2.0 * UpperInterior.point(n_max), 0.5, UpperInterior.point(n_max))
        + piece(pt, t_below, UpperInterior.point(below), 1.0)
}

/// Upper bound for `E(X)/‖h‖²` from the dyadic pieces `n_min..=n_max` of all
/// four branches plus the closing caps. The `u < 0` branch contributes
/// nonpositive terms; its unlisted pieces are dropped, which only raises the sum.
pub fn dyadic_upper_bound(pt: &GeometryPoint, n_min: i32, n_max: i32) -> Result<f64> {
    if n_min > 0 || n_max < 0 {
        return Err(invalid(format!("need n_min <= 0 <= n_max, got [{n_min}, {n_max}]")));
    }
    if n_max > 1000 || n_min < -1000 {
        return Err(invalid("dyadic range is limited to |n| <= 1000"));
    }
    let mut total = caps(pt, n_min, n_max);
    for branch in DyadicBranch::ALL {
        for n in n_min..=n_max {
            total += dyadic_term(branch, n, pt);
        }
    }
    Ok(total)
}

/// Dyadic bound minus one over a `(ρ, cos θ)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundGrid {
    pub rho_axis: Vec<f64>,
    pub cos_axis: Vec<f64>,
    /// `values[i][j]` belongs to `(rho_axis[i], cos_axis[j])`.
    pub values: Vec<Vec<f64>>,
    pub n_range: (i32, i32),
}

impl BoundGrid {
    /// Evenly spaced axes over `ρ ∈ [0.01, 1]` (100 points) and `cos θ ∈ [−0.999, 0.999]` (101 points).
    pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
        (linspace(0.01, 1.0, 100), linspace(-0.999, 0.999, 101))
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.rho_axis.iter().enumerate().flat_map(move |(i, &r)| {
            self.cos_axis.iter().enumerate().map(move |(j, &c)| (r, c, self.values[i][j]))
        })
    }

    /// Writes `rho,cos_theta,bound_minus_one` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "rho,cos_theta,bound_minus_one")?;
        for (r, c, v) in self.cells() {
            writeln!(out, "{r},{c},{v}")?;
        }
        out.flush()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

pub fn bound_contour(
    rho_axis: &[f64],
    cos_axis: &[f64],
    n_min: i32,
    n_max: i32,
    exec: Execution,
) -> Result<BoundGrid> {
    for axis in [rho_axis, cos_axis] {
        if axis.is_empty() || axis.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("grid axes must be nonempty and strictly increasing"));
        }
    }
    let points = rho_axis
        .iter()
        .flat_map(|&r| cos_axis.iter().map(move |&c| GeometryPoint::new(r, c)))
        .collect::<Result<Vec<_>>>()?;
    let flat = exec::map_indexed(exec, points.len(), |k| dyadic_upper_bound(&points[k], n_min, n_max).map(|v| v - 1.0));
    let flat = flat.into_iter().collect::<Result<Vec<_>>>()?;
    let values = flat.chunks(cos_axis.len()).map(|c| c.to_vec()).collect();
    Ok(BoundGrid { rho_axis: rho_axis.to_vec(), cos_axis: cos_axis.to_vec(), values, n_range: (n_min, n_max) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::case_weight::{case_exponent, case_weight_f};
    use crate::analysis::curvature::curvature_expectation_quad;

    #[test]
    fn cut_points_hit_the_dyadic_levels() {
        for n in -5..6 {
            let p = 2f64.powi(n);
            assert!((case_exponent(DyadicBranch::AboveOne.point(n)) - p).abs() < 1e-9 * p.max(1.0));
            assert!((case_exponent(DyadicBranch::Negative.point(n)) - p).abs() < 1e-9 * p.max(1.0));
            assert!((case_exponent(DyadicBranch::LowerInterior.point(n)) + p).abs() < 1e-9 * p.max(1.0));
            assert!((case_exponent(DyadicBranch::UpperInterior.point(n)) + p).abs() < 1e-9 * p.max(1.0));
        }
    }

    #[test]
    fn single_term_by_hand() {
        let pt = GeometryPoint::new(1.0, 0.0).unwrap();
        let a0 = (1.0 + 5f64.sqrt()) / 2.0;
        let hand = (1.0 - 1f64.tanh()) * (2.0 / PI) * (0.4 - a0 / (1.0 + a0 * a0) + 2f64.atan() - a0.atan());
        let term = dyadic_term(DyadicBranch::AboveOne, 1, &pt);
        assert!((term - hand).abs() < 1e-15);
        assert!((term - 0.0065).abs() < 5e-5);
    }

    #[test]
    fn far_terms_vanish() {
        let pt = GeometryPoint::new(0.7, 0.3).unwrap();
        for n in 8..21 {
            assert!(dyadic_term(DyadicBranch::AboveOne, n, &pt).abs() < 1e-20);
        }
    }

    #[test]
    fn piece_constants_dominate_f() {
        // sample each piece densely and check f stays below the constant used
        for branch in DyadicBranch::ALL {
            for n in -6..6 {
                let (un, prev) = (branch.point(n), branch.point(n - 1));
                let (lo, hi) = if un < prev { (un, prev) } else { (prev, un) };
                let tn = 2f64.powi(n).tanh();
                let coef = match branch {
                    DyadicBranch::AboveOne => (1.0 - 2f64.powi(n - 1).tanh()) * un,
                    DyadicBranch::Negative => (1.0 - tn) * prev,
                    DyadicBranch::LowerInterior => (1.0 + tn) * un,
                    DyadicBranch::UpperInterior => (1.0 + tn) * prev,
                };
                for k in 0..=200 {
                    let u = lo + (hi - lo) * k as f64 / 200.0;
                    assert!(case_weight_f(u) <= coef * (1.0 + 1e-12) + 1e-300, "{branch:?} n={n} u={u}");
                }
            }
        }
    }

    #[test]
    fn bound_dominates_quadrature() {
        for r in [0.05, 0.5, 0.95] {
            for c in [-0.9, 0.0, 0.9] {
                let pt = GeometryPoint::new(r, c).unwrap();
                let b = dyadic_upper_bound(&pt, -20, 20).unwrap();
                assert!(b >= curvature_expectation_quad(&pt).unwrap());
            }
        }
        let pt = GeometryPoint::new(0.5, 0.0).unwrap();
        assert!(dyadic_upper_bound(&pt, 1, 20).is_err());
    }

    #[test]
    fn contour_shape_and_csv() {
        let grid = bound_contour(&[0.1, 0.5], &[-0.5, 0.0, 0.5], -20, 20, Execution::default()).unwrap();
        assert_eq!(grid.values.len(), 2);
        assert_eq!(grid.values[0].len(), 3);
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("rho,cos_theta,bound_minus_one"));
        assert_eq!(text.lines().count(), 7);
        assert!(bound_contour(&[0.5, 0.1], &[0.0], -1, 1, Execution::default()).is_err());
        assert!(bound_contour(&[0.5], &[1.0], -1, 1, Execution::default()).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-0.999, 0.999, 101);
        assert_eq!((v[0], v[100]), (-0.999, 0.999));
        assert!(v[50].abs() < 1e-15);
    }
}
