//! Spectral initialization by weighted power iteration.

use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::norm;
use crate::problem::{relative_error, ErrorStats, Measurements, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitVariant {
    /// `wᵢ = tanh(yᵢ/(α ŷ)) · 𝟙(yᵢ > β ŷ)`.
    TanhSpectral { alpha: f64, beta: f64 },
    /// `wᵢ = yᵢ · 𝟙(yᵢ ≤ α_y² ŷ)`.
    TruncatedSpectral { alpha_y: f64 },
}

impl InitVariant {
    pub fn tanh() -> Self {
        InitVariant::TanhSpectral { alpha: 4.0, beta: 1.0 }
    }

    pub fn truncated() -> Self {
        InitVariant::TruncatedSpectral { alpha_y: 3.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitVariant::TanhSpectral { .. } => "tanh",
            InitVariant::TruncatedSpectral { .. } => "truncated",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            InitVariant::TanhSpectral { alpha, beta } => {
                if !(alpha > 0.0 && alpha.is_finite()) || !(beta >= 0.0 && beta.is_finite()) {
                    return Err(invalid(format!("tanh init needs alpha > 0, beta >= 0 (got {alpha}, {beta})")));
                }
            }
            InitVariant::TruncatedSpectral { alpha_y } => {
                if !(alpha_y > 0.0 && alpha_y.is_finite()) {
                    return Err(invalid(format!("truncated init needs alpha_y > 0 (got {alpha_y})")));
                }
            }
        }
        Ok(())
    }

    /// Per-measurement weights given the observations and their mean.
    pub fn weights(&self, y: ArrayView1<f64>, y_hat: f64) -> Array1<f64> {
        match *self {
            InitVariant::TanhSpectral { alpha, beta } => {
                y.mapv(|v| if v > beta * y_hat { (v / (alpha * y_hat)).tanh() } else { 0.0 })
            }
            InitVariant::TruncatedSpectral { alpha_y } => {
                let cut = alpha_y * alpha_y * y_hat;
                y.mapv(|v| if v <= cut { v } else { 0.0 })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitMethod {
    pub variant: InitVariant,
    pub power_iters: usize,
    pub seed: u64,
}

impl InitMethod {
    pub fn new(variant: InitVariant, seed: u64) -> Self {
        Self { variant, power_iters: 100, seed }
    }

    pub fn tanh(seed: u64) -> Self {
        Self::new(InitVariant::tanh(), seed)
    }

    pub fn truncated(seed: u64) -> Self {
        Self::new(InitVariant::truncated(), seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.power_iters == 0 {
            return Err(invalid("power_iters must be at least 1"));
        }
        self.variant.validate()
    }
}

/// Seeded Gaussian direction used as the power-iteration start.
pub fn random_unit(n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Array1<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = norm(v.view());
        if len > 0.0 {
            return v / len;
        }
    }
}

/// Power iteration from a seeded random start; returns `√ŷ · z`.
pub fn spectral_init(meas: &Measurements, method: &InitMethod) -> Result<Array1<f64>> {
    method.validate()?;
    spectral_init_from(meas, method, random_unit(meas.n(), method.seed).view())
}

/// Power iteration from a caller-provided start vector.
pub fn spectral_init_from(
    meas: &Measurements,
    method: &InitMethod,
    start: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    method.validate()?;
    let y_hat = meas.y().mean().unwrap_or(0.0);
    if !(y_hat > 0.0) {
        return Err(Error::DegenerateSpectrum("all observations are zero".into()));
    }
    let w = method.variant.weights(meas.y(), y_hat);
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSpectrum(format!(
            "{} weights are all zero after trimming",
            method.variant.name()
        )));
    }
    let len = norm(start);
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::DegenerateSpectrum("start vector has zero or non-finite norm".into()));
    }
    let mut z = start.to_owned() / len;
    let inv_m = 1.0 / meas.m() as f64;
    for it in 0..method.power_iters {
        let mut p = meas.project(z.view())?;
        p *= &w;
        let next = meas.back_project(p.view(), inv_m);
        let len = norm(next.view());
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::DegenerateSpectrum(format!(
                "power iteration collapsed to zero at step {}",
                it + 1
            )));
        }
        z = next / len;
    }
    Ok(z * y_hat.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitQualityRow {
    pub method: String,
    pub stats: ErrorStats,
}

/// Runs every method on the same instance and scores it against the signal.
pub fn init_quality_report(inst: &ProblemInstance, methods: &[InitMethod]) -> Result<Vec<InitQualityRow>> {
    if methods.is_empty() {
        return Err(invalid("init_quality_report needs at least one method"));
    }
    let meas = inst.measurements();
    methods
        .iter()
        .map(|m| {
            let z = spectral_init(&meas, m)?;
            Ok(InitQualityRow { method: m.variant.name().to_string(), stats: relative_error(z.view(), inst.x())? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::problem::make_instance;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn eye_case() -> (Array2<f64>, Array1<f64>) {
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let x = array![1.0, 0.0];
        let y = crate::problem::observe(a.view(), x.view()).unwrap();
        (a, y)
    }

    #[test]
    fn two_by_two_converges_to_first_axis() {
        let (a, y) = eye_case();
        let meas = Measurements::new(a.view(), y.view()).unwrap();
        let start = array![0.3, 0.8];
        let z = spectral_init_from(&meas, &InitMethod::tanh(0), start.view()).unwrap();
        assert!((z[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(z[1].abs() < 1e-12);
    }

    #[test]
    fn one_step_from_the_eigenvector() {
        let (a, y) = eye_case();
        let meas = Measurements::new(a.view(), y.view()).unwrap();
        let method = InitMethod { power_iters: 1, ..InitMethod::tanh(0) };
        let z = spectral_init_from(&meas, &method, array![1.0, 0.0].view()).unwrap();
        assert_eq!(z, array![0.5f64.sqrt(), 0.0]);
    }

    #[test]
    fn degenerate_trimming_is_reported() {
        // equal observations: y = ŷ, so the strict β trim removes everything
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let y = array![1.0, 1.0];
        let meas = Measurements::new(a.view(), y.view()).unwrap();
        let err = spectral_init(&meas, &InitMethod::tanh(3)).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum(_)));
        let zeros = array![0.0, 0.0];
        let meas = Measurements::new(a.view(), zeros.view()).unwrap();
        assert!(matches!(spectral_init(&meas, &InitMethod::truncated(3)), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn orthogonal_start_collapses() {
        let (a, y) = eye_case();
        let meas = Measurements::new(a.view(), y.view()).unwrap();
        let err = spectral_init_from(&meas, &InitMethod::tanh(0), array![0.0, 1.0].view()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum(_)));
    }

    #[test]
    fn invalid_methods_rejected() {
        let inst = make_instance(4, 8, 1, 1.0).unwrap();
        let meas = inst.measurements();
        let bad = InitMethod { power_iters: 0, ..InitMethod::tanh(1) };
        assert!(spectral_init(&meas, &bad).is_err());
        let bad = InitMethod::new(InitVariant::TanhSpectral { alpha: 0.0, beta: 1.0 }, 1);
        assert!(spectral_init(&meas, &bad).is_err());
    }

    #[test]
    fn report_rows_are_deterministic() {
        let inst = make_instance(30, 90, 11, 1.0).unwrap();
        let rows = init_quality_report(&inst, &[InitMethod::tanh(5), InitMethod::truncated(5)]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].method, "tanh");
        let again = init_quality_report(&inst, &[InitMethod::tanh(5), InitMethod::tanh(5)]).unwrap();
        assert_eq!(again[0], again[1]);
        assert_eq!(again[0], rows[0]);
        assert!(init_quality_report(&inst, &[]).is_err());
    }

    #[test]
    fn execution_modes_agree() {
        let inst = make_instance(40, 300, 2, 1.0).unwrap();
        let seq = spectral_init(&inst.measurements().with_execution(Execution::Sequential), &InitMethod::tanh(9)).unwrap();
        let par = spectral_init(&inst.measurements().with_execution(Execution::Parallel), &InitMethod::tanh(9)).unwrap();
        assert_eq!(seq, par);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn output_norm_is_root_mean_observation(seed in 0u64..10_000, trunc: bool) {
            let inst = make_instance(12, 60, seed, 1.3).unwrap();
            let method = if trunc { InitMethod::truncated(seed) } else { InitMethod::tanh(seed) };
            let z = spectral_init(&inst.measurements(), &method).unwrap();
            let target = inst.y().mean().unwrap().sqrt();
            prop_assert!((norm(z.view()) - target).abs() < 1e-9);
        }

        #[test]
        fn direction_is_scale_equivariant(seed in 0u64..10_000, c in 0.1f64..10.0) {
            let inst = make_instance(10, 50, seed, 1.0).unwrap();
            let big = inst.scaled(c).unwrap();
            let method = InitMethod::tanh(seed ^ 0xabc);
            let z = spectral_init(&inst.measurements(), &method).unwrap();
            let zc = spectral_init(&big.measurements(), &method).unwrap();
            let (u, uc) = (&z / norm(z.view()), &zc / norm(zc.view()));
            let diff = (&u - &uc).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
            prop_assert!(diff < 1e-9, "direction moved by {}", diff);
            prop_assert!((norm(zc.view()) - c * norm(z.view())).abs() < 1e-9 * c.max(1.0));
        }
    }
}
