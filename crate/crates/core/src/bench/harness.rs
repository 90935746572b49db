use std::io::{BufRead, Write};
use std::time::Instant;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::config::{BenchConfig, InitChoice, MethodSpec};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::init::{spectral_init, InitMethod};
use crate::optimizer::solve;
use crate::problem::ProblemInstance;

/// Offset between an instance seed and the seed of its power-iteration start.
pub const INIT_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of the `trial`-th instance.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    base_seed.wrapping_add(trial as u64)
}

pub fn init_seed(instance_seed: u64) -> u64 {
    instance_seed.wrapping_add(INIT_SEED_OFFSET)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: String,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean over trials of the smallest relative error reached (trials that
    /// failed before the first step are left out; `inf` if all did).
    pub mean_min_rel_error: f64,
    /// Binomial standard error `√(p(1−p)/trials)`.
    pub success_std_error: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub config_hash: String,
    pub base_seed: u64,
    pub rows: Vec<BenchRow>,
}

const HEADER: &str = "method,m,n,trials,successes,success_rate,mean_min_rel_error,success_std_error,wall_time_s";

impl BenchResult {
    pub fn row(&self, method: &str, m: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method && r.m == m)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# config_hash={} base_seed={}", self.config_hash, self.base_seed)?;
        writeln!(out, "{HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.method,
                r.m,
                r.n,
                r.trials,
                r.successes,
                r.success_rate,
                r.mean_min_rel_error,
                r.success_std_error,
                r.wall_time_s
            )?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
        let (i, first) = lines.next().ok_or_else(|| perr(0, "empty file"))?;
        let first = first?;
        let meta = first.strip_prefix("# ").ok_or_else(|| perr(i, "missing provenance comment"))?;
        let (mut hash, mut seed) = (None, None);
        for kv in meta.split_whitespace() {
            match kv.split_once('=') {
                Some(("config_hash", v)) => hash = Some(v.to_string()),
                Some(("base_seed", v)) => seed = Some(v.parse().map_err(|_| perr(i, "bad base_seed"))?),
                _ => {}
            }
        }
        let (config_hash, base_seed) = match (hash, seed) {
            (Some(h), Some(s)) => (h, s),
            _ => return Err(perr(i, "provenance comment needs config_hash and base_seed")),
        };
        let (i, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
        if header?.trim() != HEADER {
            return Err(perr(i, "unexpected header"));
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(perr(i, "expected 9 fields"));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|_| perr(i, "bad number"));
            let count = |k: usize| f[k].parse::<usize>().map_err(|_| perr(i, "bad count"));
            rows.push(BenchRow {
                method: f[0].to_string(),
                m: count(1)?,
                n: count(2)?,
                trials: count(3)?,
                successes: count(4)?,
                success_rate: num(5)?,
                mean_min_rel_error: num(6)?,
                success_std_error: num(7)?,
                wall_time_s: num(8)?,
            });
        }
        Ok(Self { config_hash, base_seed, rows })
    }

    /// Copy with every `wall_time_s` zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut c = self.clone();
        c.rows.iter_mut().for_each(|r| r.wall_time_s = 0.0);
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bench result is serializable")
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    success: bool,
    min_rel_error: f64,
    seconds: f64,
}

pub(crate) fn start_point(
    inst: &ProblemInstance,
    init: &InitChoice,
    exec: Execution,
) -> Result<Array1<f64>> {
    match *init {
        InitChoice::Oracle => Ok(inst.x().to_owned()),
        InitChoice::Spectral { variant, power_iters } => {
            let method = InitMethod { variant, power_iters, seed: init_seed(inst.seed()) };
            spectral_init(&inst.measurements().with_execution(exec), &method)
        }
    }
}

fn run_method(inst: &ProblemInstance, spec: &MethodSpec, exec: Execution) -> Outcome {
    let start = Instant::now();
    let mut opts = spec.opts;
    opts.execution = exec;
    let result = start_point(inst, &spec.init, exec).and_then(|z0| solve(inst, z0.view(), &spec.rule, &opts));
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(r) => {
            if r.aborted {
                log::warn!(
                    "{} m={} seed={}: {}",
                    spec.name,
                    inst.m(),
                    inst.seed(),
                    r.abort_reason.as_deref().unwrap_or("aborted")
                );
            }
            Outcome { success: r.success, min_rel_error: r.min_rel_error, seconds }
        }
        Err(e) => {
            log::warn!("{} m={} seed={}: trial failed: {e}", spec.name, inst.m(), inst.seed());
            Outcome { success: false, min_rel_error: f64::INFINITY, seconds }
        }
    }
}

/// Runs every (m, trial) job, each on its own instance shared by all methods.
///
/// Jobs are spread over the worker pool; each solve runs sequentially inside
/// its job. Trial failures are logged and counted, never propagated.
pub fn run_bench(config: &BenchConfig, exec: Execution) -> Result<BenchResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> =
        config.m_list.iter().flat_map(|&m| (0..config.trials).map(move |t| (m, t))).collect();
    let outcomes = exec::with_threads(config.threads, || {
        exec::map_indexed(exec, jobs.len(), |k| {
            let (m, trial) = jobs[k];
            let seed = trial_seed(config.base_seed, trial);
            match ProblemInstance::generate(config.n, m, seed, config.signal_norm) {
                Ok(inst) => config.methods.iter().map(|s| run_method(&inst, s, Execution::Sequential)).collect(),
                Err(e) => {
                    log::warn!("m={m} seed={seed}: instance generation failed: {e}");
                    vec![Outcome { success: false, min_rel_error: f64::INFINITY, seconds: 0.0 }; config.methods.len()]
                }
            }
        })
    });

    let mut rows = Vec::new();
    for (mi, spec) in config.methods.iter().enumerate() {
        for &m in &config.m_list {
            let picked: Vec<Outcome> =
                jobs.iter().zip(&outcomes).filter(|((jm, _), _)| *jm == m).map(|(_, o): (_, &Vec<Outcome>)| o[mi]).collect();
            let successes = picked.iter().filter(|o| o.success).count();
            let trials = picked.len();
            let p = successes as f64 / trials as f64;
            let finite: Vec<f64> = picked.iter().map(|o| o.min_rel_error).filter(|v| v.is_finite()).collect();
            let mean_min_rel_error =
                if finite.is_empty() { f64::INFINITY } else { finite.iter().sum::<f64>() / finite.len() as f64 };
            rows.push(BenchRow {
                method: spec.name.clone(),
                m,
                n: config.n,
                trials,
                successes,
                success_rate: p,
                mean_min_rel_error,
                success_std_error: (p * (1.0 - p) / trials as f64).sqrt(),
                wall_time_s: picked.iter().map(|o| o.seconds).sum(),
            });
        }
    }
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.m.cmp(&b.m)));
    Ok(BenchResult { config_hash: config.config_hash(), base_seed: config.base_seed, rows })
}
