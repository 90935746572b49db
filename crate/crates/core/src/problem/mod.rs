//! Problem instances: Gaussian designs, noiseless quadratic observations and
//! the sign-invariant recovery metrics.

mod archive;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, norm};

pub use archive::{read_instance, write_instance};

/// A real phase-retrieval problem `yᵢ = (aᵢᵀx)²`.
///
/// Instances are immutable once built. Random instances use a ChaCha8
/// stream seeded with `seed`: first the `n` entries of the signal direction,
/// then the `m × n` design entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    x: Array1<f64>,
    a: Array2<f64>,
    y: Array1<f64>,
    seed: u64,
    signal_norm: f64,
}

impl ProblemInstance {
    pub fn generate(n: usize, m: usize, seed: u64, signal_norm: f64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(invalid(format!("instance needs n >= 1 and m >= 1 (got n={n}, m={m})")));
        }
        if !(signal_norm > 0.0 && signal_norm.is_finite()) {
            return Err(invalid(format!("signal_norm must be positive, got {signal_norm}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Array1<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        // a zero draw has probability zero; redraw rather than divide by it
        while norm(x.view()) == 0.0 {
            x = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        }
        let scale = signal_norm / norm(x.view());
        x.mapv_inplace(|v| v * scale);
        let a = Array2::from_shape_simple_fn((m, n), || StandardNormal.sample(&mut rng));
        let y = observe(a.view(), x.view())?;
        Ok(Self { x, a, y, seed, signal_norm })
    }

    /// Builds an instance around a given design and signal.
    pub fn from_parts(a: Array2<f64>, x: Array1<f64>, seed: u64) -> Result<Self> {
        let y = observe(a.view(), x.view())?;
        let signal_norm = norm(x.view());
        Ok(Self { x, a: a.as_standard_layout().into_owned(), y, seed, signal_norm })
    }

    pub(crate) fn from_raw(
        a: Array2<f64>,
        x: Array1<f64>,
        y: Array1<f64>,
        seed: u64,
        signal_norm: f64,
    ) -> Result<Self> {
        let (m, n) = a.dim();
        if x.len() != n || y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "A is {m}x{n} but x has {} entries and y has {}",
                x.len(),
                y.len()
            )));
        }
        if y.iter().any(|v| !(*v >= 0.0)) {
            return Err(invalid("observations must be nonnegative"));
        }
        Ok(Self { x, a, y, seed, signal_norm })
    }

    /// Same design, signal scaled by `c`, observations scaled by `c²`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(invalid(format!("scale factor must be finite and nonzero, got {c}")));
        }
        Ok(Self {
            x: self.x.mapv(|v| c * v),
            a: self.a.clone(),
            y: self.y.mapv(|v| c * c * v),
            seed: self.seed,
            signal_norm: self.signal_norm * c.abs(),
        })
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }
    pub fn m(&self) -> usize {
        self.a.nrows()
    }
    pub fn x(&self) -> ArrayView1<'_, f64> {
        self.x.view()
    }
    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }
    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn signal_norm(&self) -> f64 {
        self.signal_norm
    }

    /// The solver-facing view: design and observations, never the signal.
    pub fn measurements(&self) -> Measurements<'_> {
        Measurements { a: self.a.view(), y: self.y.view(), exec: Execution::default() }
    }
}

pub fn make_instance(n: usize, m: usize, seed: u64, signal_norm: f64) -> Result<ProblemInstance> {
    ProblemInstance::generate(n, m, seed, signal_norm)
}

/// Design matrix and observations, as seen by initializers and gradient rules.
#[derive(Debug, Clone, Copy)]
pub struct Measurements<'a> {
    a: ArrayView2<'a, f64>,
    y: ArrayView1<'a, f64>,
    exec: Execution,
}

impl<'a> Measurements<'a> {
    pub fn new(a: ArrayView2<'a, f64>, y: ArrayView1<'a, f64>) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "design has {} rows but {} observations were given",
                a.nrows(),
                y.len()
            )));
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(invalid("design matrix must be non-empty"));
        }
        if y.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("observations must be finite and nonnegative"));
        }
        Ok(Self { a, y, exec: Execution::default() })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn a(&self) -> ArrayView2<'a, f64> {
        self.a
    }
    pub fn y(&self) -> ArrayView1<'a, f64> {
        self.y
    }
    pub fn n(&self) -> usize {
        self.a.ncols()
    }
    pub fn m(&self) -> usize {
        self.a.nrows()
    }
    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// `A z`, after checking `z` has length n and finite entries.
    pub(crate) fn project(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        if z.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "iterate has {} entries, design has {} columns",
                z.len(),
                self.n()
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("iterate contains a non-finite entry".into()));
        }
        Ok(linalg::matvec(self.exec, self.a, z))
    }

    /// `scale · Aᵀ r`.
    pub(crate) fn back_project(&self, r: ArrayView1<f64>, scale: f64) -> Array1<f64> {
        let mut g = linalg::rmatvec(self.exec, self.a, r);
        g.mapv_inplace(|v| v * scale);
        g
    }
}

/// Elementwise square of `A x`.
pub fn observe(a: ArrayView2<f64>, x: ArrayView1<f64>) -> Result<Array1<f64>> {
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} columns but x has {} entries",
            a.ncols(),
            x.len()
        )));
    }
    Ok(linalg::matvec(Execution::Sequential, a, x).mapv(|v| v * v))
}

/// Recovery error of an estimate, up to the global sign ambiguity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    /// `min(‖z − x‖, ‖z + x‖) / ‖x‖`.
    pub rel_error: f64,
    /// `xᵀh / (‖x‖‖h‖)` with `h = x − s·z`; 0 when `h = 0`.
    pub correlation: f64,
    /// The sign `s` with `s·z` closest to `x` (+1 on ties).
    pub aligned_sign: f64,
    /// Set when `s·z == x` exactly, where the correlation is undefined.
    pub exact: bool,
}

pub fn relative_error(z: ArrayView1<f64>, x: ArrayView1<f64>) -> Result<ErrorStats> {
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has {} entries, signal has {}",
            z.len(),
            x.len()
        )));
    }
    let x_norm = norm(x);
    if x_norm == 0.0 {
        return Err(invalid("relative error is undefined for a zero signal"));
    }
    let minus: f64 = z.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let plus: f64 = z.iter().zip(x).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    let sign = if minus <= plus { 1.0 } else { -1.0 };
    let h: Array1<f64> = x.iter().zip(z).map(|(xv, zv)| xv - sign * zv).collect();
    let h_norm = norm(h.view());
    let (correlation, exact) = if h_norm == 0.0 {
        (0.0, true)
    } else {
        let c = x.dot(&h) / (x_norm * h_norm);
        (c.clamp(-1.0, 1.0), false)
    };
    Ok(ErrorStats { rel_error: minus.min(plus) / x_norm, correlation, aligned_sign: sign, exact })
}
