use std::io::Write;

use serde::{Deserialize, Serialize};

use super::harness::{init_seed, trial_seed};
use crate::error::{invalid, Result};
use crate::exec::{self, Execution};
use crate::init::{spectral_init, InitMethod, InitVariant};
use crate::problem::{relative_error, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitEvalRow {
    pub method: String,
    pub trial: usize,
    pub rel_error: f64,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSummary {
    pub method: String,
    pub trials: usize,
    pub mean_rel_error: f64,
    pub var_rel_error: f64,
    pub mean_correlation: f64,
    pub var_correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitEvalTable {
    pub n: usize,
    pub m: usize,
    pub base_seed: u64,
    pub rows: Vec<InitEvalRow>,
    pub summary: Vec<InitSummary>,
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

impl InitEvalTable {
    pub fn summary_for(&self, method: &str) -> Option<&InitSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# n={} m={} base_seed={}", self.n, self.m, self.base_seed)?;
        writeln!(out, "method,trial,rel_error,correlation")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.method, r.trial, r.rel_error, r.correlation)?;
        }
        out.flush()
    }
}

/// Scores each initializer on `trials` instances of size `(n, m)`.
///
/// Instance `k` uses seed `base_seed + k`; every method starts its power
/// iteration from the same seeded vector.
pub fn run_init_eval(
    n: usize,
    m: usize,
    trials: usize,
    methods: &[InitVariant],
    base_seed: u64,
    exec: Execution,
) -> Result<InitEvalTable> {
    if methods.is_empty() || trials == 0 {
        return Err(invalid("init evaluation needs at least one method and one trial"));
    }
    let per_trial = exec::map_indexed(exec, trials, |trial| -> Result<Vec<InitEvalRow>> {
        let inst = ProblemInstance::generate(n, m, trial_seed(base_seed, trial), 1.0)?;
        let meas = inst.measurements().with_execution(Execution::Sequential);
        methods
            .iter()
            .map(|v| {
                let z = spectral_init(&meas, &InitMethod::new(*v, init_seed(inst.seed())))?;
                let s = relative_error(z.view(), inst.x())?;
                Ok(InitEvalRow { method: v.name().to_string(), trial, rel_error: s.rel_error, correlation: s.correlation })
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(trials * methods.len());
    for r in per_trial {
        rows.extend(r?);
    }
    let summary = methods
        .iter()
        .map(|v| {
            let name = v.name();
            let errs: Vec<f64> = rows.iter().filter(|r| r.method == name).map(|r| r.rel_error).collect();
            let cors: Vec<f64> = rows.iter().filter(|r| r.method == name).map(|r| r.correlation).collect();
            let (mean_rel_error, var_rel_error) = mean_var(&errs);
            let (mean_correlation, var_correlation) = mean_var(&cors);
            InitSummary {
                method: name.to_string(),
                trials,
                mean_rel_error,
                var_rel_error,
                mean_correlation,
                var_correlation,
            }
        })
        .collect();
    Ok(InitEvalTable { n, m, base_seed, rows, summary })
}
