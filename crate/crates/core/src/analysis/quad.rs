//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// `∫_a^b f` to absolute tolerance `tol` on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_capped(&f, a, b, tol, MAX_INTERVALS)
}

pub fn integrate_capped<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, intervals: 0 });
    }
    let (val, err) = kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { err, a, b, val });
    let (mut total, mut total_err) = (val, err);
    loop {
        if total_err <= tol {
            // the running sum can cancel catastrophically; confirm with a fresh one
            total_err = heap.iter().map(|p: &Piece| p.err).sum();
            if total_err <= tol {
                break;
            }
        }
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}]: error estimate {total_err:.3e} after {} intervals",
                heap.len()
            )));
        }
        let p = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature(format!("interval around {mid} cannot be split further")));
        }
        let (v1, e1) = kronrod(f, p.a, mid);
        let (v2, e2) = kronrod(f, mid, p.b);
        total += v1 + v2 - p.val;
        total_err += e1 + e2 - p.err;
        heap.push(Piece { err: e1, a: p.a, b: mid, val: v1 });
        heap.push(Piece { err: e2, a: mid, b: p.b, val: v2 });
        if !total.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
    }
    // re-sum to shed the drift of the running update
    let pieces = heap.into_vec();
    let value = pieces.iter().map(|p| p.val).sum();
    let abs_error = pieces.iter().map(|p| p.err).sum();
    Ok(QuadResult { value, abs_error, intervals: pieces.len() })
}

/// `∫_a^∞ f` through `u = a + t/(1−t)`.
pub fn integrate_upper<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<QuadResult> {
    let g = |t: f64| {
        let one_t = 1.0 - t;
        f(a + t / one_t) / (one_t * one_t)
    };
    integrate_capped(&g, 0.0, 1.0, tol, MAX_INTERVALS)
}

/// `∫_{−∞}^b f`.
pub fn integrate_lower<F: Fn(f64) -> f64>(f: F, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_upper(|u| f(-u), -b, tol)
}

/// `∫_ℝ f`, split at `centre` into two half-line integrals.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, centre: f64, tol: f64) -> Result<QuadResult> {
    let lo = integrate_lower(&f, centre, 0.5 * tol)?;
    let hi = integrate_upper(&f, centre, 0.5 * tol)?;
    Ok(QuadResult {
        value: lo.value + hi.value,
        abs_error: lo.abs_error + hi.abs_error,
        intervals: lo.intervals + hi.intervals,
    })
}
