//! Nesterov-accelerated refinement loop.
//!
//! With `v₀ = 0`, each step computes
//! `v_t = μ v_{t−1} − s ∇_t` and `z_t = z_{t−1} − μ v_{t−1} + (1+μ) v_t`.
//! The loop always runs the requested number of steps; success is judged on
//! the smallest relative error seen along the way.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::flows::FlowRule;
use crate::linalg::norm;
use crate::problem::ProblemInstance;

pub use crate::flows::rtanh_schedule as schedule_coefficient;

/// Iterates whose norm grows past this multiple of the start norm abort the run.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub steps: usize,
    pub step_size: f64,
    pub momentum: f64,
    pub success_threshold: f64,
    pub record_every: usize,
    #[serde(default)]
    pub execution: Execution,
}

impl SolveOptions {
    /// Settings for the tanh flows and the TWF baseline.
    pub fn tanh() -> Self {
        Self {
            steps: 1500,
            step_size: 0.02,
            momentum: 0.9,
            success_threshold: 0.01,
            record_every: 1,
            execution: Execution::default(),
        }
    }

    /// Settings for the reweighted flows.
    pub fn rtanh() -> Self {
        Self { step_size: 0.2, ..Self::tanh() }
    }

    pub fn for_rule(rule: &FlowRule) -> Self {
        if rule.uses_iteration() {
            Self::rtanh()
        } else {
            Self::tanh()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(invalid("steps must be at least 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(invalid(format!("step size must be positive, got {}", self.step_size)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(invalid(format!("momentum must lie in [0, 1), got {}", self.momentum)));
        }
        if !(self.success_threshold > 0.0) {
            return Err(invalid("success threshold must be positive"));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every must be at least 1"));
        }
        Ok(())
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::tanh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub rule: String,
    pub instance_seed: u64,
    pub final_z: Vec<f64>,
    pub trajectory: Vec<TrajectoryPoint>,
    /// Smallest relative error over all iterations `1..=iterations_run`,
    /// including the ones not kept in `trajectory`.
    pub min_rel_error: f64,
    pub success: bool,
    pub iterations_run: usize,
    pub aborted: bool,
    pub abort_reason: Option<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are always serializable")
    }
}

fn rel_error_fast(z: &Array1<f64>, x: ArrayView1<f64>, x_norm: f64) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in z.iter().zip(x) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    minus.min(plus).sqrt() / x_norm
}

/// Runs the accelerated iteration from `z0` and scores it against the signal.
pub fn solve(inst: &ProblemInstance, z0: ArrayView1<f64>, rule: &FlowRule, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    rule.validate()?;
    if z0.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!("z0 has {} entries, expected {}", z0.len(), inst.n())));
    }
    if z0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("z0 contains a non-finite entry".into()));
    }
    let meas = inst.measurements().with_execution(opts.execution);
    let x = inst.x();
    let x_norm = norm(x);
    let start_norm = norm(z0);
    let scale = if start_norm > 0.0 { start_norm } else { meas.y().mean().unwrap_or(1.0).sqrt().max(1e-300) };
    let limit = DIVERGENCE_FACTOR * scale;

    let (mu, s) = (opts.momentum, opts.step_size);
    let mut z = z0.to_owned();
    let mut v = Array1::<f64>::zeros(inst.n());
    let mut trajectory = Vec::with_capacity(opts.steps / opts.record_every + 1);
    let mut min_err = f64::INFINITY;
    let mut abort_reason = None;
    let mut iterations_run = 0;

    for t in 1..=opts.steps {
        let grad = match rule.gradient(&meas, z.view(), t) {
            Ok(g) => g,
            Err(e) => {
                abort_reason = Some(format!("gradient failed at iteration {t}: {e}"));
                break;
            }
        };
        let v_next = &v * mu - &grad * s;
        let z_next = &z - &(&v * mu) + &(&v_next * (1.0 + mu));
        let z_len = norm(z_next.view());
        if !z_len.is_finite() {
            abort_reason = Some(format!("non-finite iterate at iteration {t}"));
            break;
        }
        if z_len > limit {
            abort_reason = Some(format!("iterate norm {z_len:.3e} exceeded {limit:.3e} at iteration {t}"));
            break;
        }
        z = z_next;
        v = v_next;
        iterations_run = t;
        let err = rel_error_fast(&z, x, x_norm);
        min_err = min_err.min(err);
        if t % opts.record_every == 0 || t == opts.steps {
            trajectory.push(TrajectoryPoint { iteration: t, rel_error: err });
        }
    }

    if let Some(reason) = &abort_reason {
        log::debug!("solve aborted ({}): {reason}", rule.name());
        // keep the last accepted iterate visible even when it fell between records
        if iterations_run > 0 && trajectory.last().map(|p| p.iteration) != Some(iterations_run) {
            trajectory.push(TrajectoryPoint { iteration: iterations_run, rel_error: rel_error_fast(&z, x, x_norm) });
        }
    }

    Ok(SolveReport {
        rule: rule.name().to_string(),
        instance_seed: inst.seed(),
        final_z: z.to_vec(),
        trajectory,
        min_rel_error: min_err,
        success: min_err < opts.success_threshold,
        iterations_run,
        aborted: abort_reason.is_some(),
        abort_reason,
    })
}
