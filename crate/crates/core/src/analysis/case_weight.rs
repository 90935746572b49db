//! The per-measurement case weight `f(u)` of the curvature term.

use serde::{Deserialize, Serialize};

/// `1 − tanh v`, accurate for large positive `v`.
#[inline]
pub fn one_minus_tanh(v: f64) -> f64 {
    2.0 / (1.0 + (2.0 * v).exp())
}

/// Exponent of the tanh factor: `u² − u` outside `[0, 1]`,
/// `¼ − 1/(16(u − ½)²)` inside (−∞ at `u = ½`).
#[inline]
pub(crate) fn case_exponent(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        u * u - u
    } else {
        let d = u - 0.5;
        0.25 - 1.0 / (16.0 * d * d)
    }
}

/// `f(u) = (1 − tanh q(u)) · u`.
pub fn case_weight_f(u: f64) -> f64 {
    if u == 0.5 {
        return 1.0;
    }
    one_minus_tanh(case_exponent(u)) * u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Supremum {
    pub value: f64,
    pub argmax: f64,
}

/// Global maximum of [`case_weight_f`] by grid search and golden-section refinement.
///
/// `f` is negative for `u < 0` and decays like `u e^{−2u²}` for large `u`, so
/// the search window `[−1, 4]` holds the maximum.
pub fn sup_case_weight() -> Supremum {
    static CACHE: std::sync::OnceLock<Supremum> = std::sync::OnceLock::new();
    *CACHE.get_or_init(search_supremum)
}

fn search_supremum() -> Supremum {
    let (lo, hi, n) = (-1.0, 4.0, 50_000);
    let step = (hi - lo) / n as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..=n {
        let u = lo + step * i as f64;
        let v = case_weight_f(u);
        if v > best.0 {
            best = (v, u);
        }
    }
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (case_weight_f(c), case_weight_f(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = case_weight_f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = case_weight_f(d);
        }
    }
    let argmax = 0.5 * (a + b);
    let value = case_weight_f(argmax).max(best.0);
    Supremum { value, argmax }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(case_weight_f(0.0), 0.0);
        assert_eq!(case_weight_f(0.5), 1.0);
        assert!((case_weight_f(1.0) - 1.0).abs() < 1e-15);
        assert!((case_weight_f(2.0) - (1.0 - 2f64.tanh()) * 2.0).abs() < 1e-15);
        assert!((case_weight_f(2.0) - 0.07194).abs() < 1e-5);
        assert!(case_weight_f(-3.0) < 0.0);
        assert!(case_weight_f(60.0) == 0.0);
    }

    #[test]
    fn continuity_at_seams() {
        for seam in [0.0f64, 1.0] {
            let outer = one_minus_tanh(seam * seam - seam) * seam;
            let d = seam - 0.5;
            let inner = one_minus_tanh(0.25 - 1.0 / (16.0 * d * d)) * seam;
            assert!((outer - inner).abs() < 1e-12);
            for eps in [1e-9, 1e-12] {
                assert!((case_weight_f(seam - eps) - case_weight_f(seam + eps)).abs() < 1e-8);
            }
        }
        assert!((case_weight_f(0.5 + 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn supremum_location() {
        let s = sup_case_weight();
        assert!((s.value - 1.31).abs() < 0.01, "{s:?}");
        assert!(s.argmax > 0.6 && s.argmax < 0.8);
        assert!(s.value >= case_weight_f(s.argmax - 0.01));
        assert!(s.value >= case_weight_f(s.argmax + 0.01));
    }

    #[test]
    fn one_minus_tanh_is_stable() {
        assert_eq!(one_minus_tanh(0.0), 1.0);
        assert_eq!(one_minus_tanh(-1e3), 2.0);
        assert!(one_minus_tanh(30.0) > 0.0);
        assert!((one_minus_tanh(30.0) / (2.0 * (-60f64).exp()) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bounded_by_supremum(u in -50.0f64..50.0) {
            prop_assert!(case_weight_f(u) <= sup_case_weight().value);
        }
    }
}
