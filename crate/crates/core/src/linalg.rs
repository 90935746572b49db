//! Dense kernels over a row-major design matrix.
//!
//! `A z` is computed row by row; `Aᵀ r` is reduced over fixed blocks of
//! `ROW_BLOCK` rows whose partial sums are added in block order. Both are
//! therefore deterministic and identical across execution modes.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::exec::{self, Execution};

pub(crate) const ROW_BLOCK: usize = 64;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm(v: ArrayView1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rows_of<'a>(a: &'a ArrayView2<'a, f64>) -> std::borrow::Cow<'a, [f64]> {
    match a.as_slice() {
        Some(s) => std::borrow::Cow::Borrowed(s),
        None => std::borrow::Cow::Owned(a.iter().copied().collect()),
    }
}

/// `A z`.
pub fn matvec(exec: Execution, a: ArrayView2<f64>, z: ArrayView1<f64>) -> Array1<f64> {
    let n = a.ncols();
    assert_eq!(n, z.len(), "matvec: column count must equal vector length");
    if a.nrows() == 0 {
        return Array1::zeros(0);
    }
    if n == 0 {
        return Array1::zeros(a.nrows());
    }
    let zs = z.to_vec();
    let data = rows_of(&a);
    let blocks = exec::map_chunks(exec, &data, n * ROW_BLOCK, |_, rows| {
        rows.chunks_exact(n).map(|row| dot(row, &zs)).collect::<Vec<_>>()
    });
    Array1::from_iter(blocks.into_iter().flatten())
}

/// `Aᵀ r`.
pub fn rmatvec(exec: Execution, a: ArrayView2<f64>, r: ArrayView1<f64>) -> Array1<f64> {
    let (m, n) = a.dim();
    assert_eq!(m, r.len(), "rmatvec: row count must equal vector length");
    if m == 0 || n == 0 {
        return Array1::zeros(n);
    }
    let rs = r.to_vec();
    let data = rows_of(&a);
    let partials = exec::map_chunks(exec, &data, n * ROW_BLOCK, |block, rows| {
        let mut acc = vec![0.0; n];
        for (k, row) in rows.chunks_exact(n).enumerate() {
            let w = rs[block * ROW_BLOCK + k];
            if w == 0.0 {
                continue;
            }
            for (o, &x) in acc.iter_mut().zip(row) {
                *o += w * x;
            }
        }
        acc
    });
    let mut out = vec![0.0; n];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Array1::from_vec(out)
}
