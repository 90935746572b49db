//! Success-rate sweeps and initializer comparisons.

mod config;
mod harness;
mod init_eval;

pub use config::{BenchConfig, InitChoice, MethodSpec};
pub use harness::{init_seed, run_bench, trial_seed, BenchResult, BenchRow, INIT_SEED_OFFSET};
pub use init_eval::{run_init_eval, InitEvalRow, InitEvalTable, InitSummary};
