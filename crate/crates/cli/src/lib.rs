//! Argument handling for the `tanhwf` binary.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, unreadable or
//! invalid config), 2 on runtime failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tanhwf::analysis::{
    bound_contour, curvature_expectation_mc, curvature_expectation_quad, dyadic_upper_bound, spectral_expectation_mc,
    spectral_gap_lower_bound, spectral_lambda1_upper_bound, sup_case_weight, validation_grid, BoundGrid,
    SpectralBoundInputs,
};
use tanhwf::bench::{init_seed, run_bench, run_init_eval, BenchConfig, InitChoice, MethodSpec};
use tanhwf::init::InitVariant;
use tanhwf::{solve, Execution, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "tanhwf", version, about = "Tanh-weighted Wirtinger flows: solver, benchmarks and bound checks")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Experiment config file (bench)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed, overriding the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Run every loop on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Success-rate sweep described by --config
    Bench,
    /// Compare spectral initializers on random instances
    InitEval {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        m: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
    },
    /// Solve one random instance and print the report
    Solve {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 600)]
        m: usize,
        /// Gradient rule: tanhwfl, tanhwfq, rtanhwfl, rtanhwf, twf
        #[arg(long, default_value = "tanhwfl")]
        rule: String,
        /// Initializer: tanh, truncated, oracle
        #[arg(long, default_value = "tanh")]
        init: String,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        step_size: Option<f64>,
        #[arg(long)]
        momentum: Option<f64>,
        #[arg(long, default_value_t = 10)]
        record_every: usize,
    },
    /// Dyadic bound surface over the (rho, cos_theta) grid
    Contour {
        #[arg(long, default_value_t = -20, allow_negative_numbers = true)]
        n_min: i32,
        #[arg(long, default_value_t = 20)]
        n_max: i32,
    },
    /// Quadrature, Monte-Carlo and dyadic bound on the 5x5 validation grid
    BoundsCheck {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Supremum of the case weight f
    SupF,
    /// Closed-form spectral bounds and their Monte-Carlo estimates
    SpectralBounds {
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<tanhwf::Error> for Failure {
    fn from(e: tanhwf::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let exec = if cli.global.sequential { Execution::Sequential } else { Execution::Parallel };
    let threads = cli.global.threads;
    let result = tanhwf::exec::with_threads(threads, || run(&cli, exec));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn run(cli: &Cli, exec: Execution) -> Outcome {
    let g = &cli.global;
    let out = g.out.as_deref();
    match &cli.command {
        Command::Bench => bench(g, exec),
        Command::InitEval { n, m, trials } => {
            let table =
                run_init_eval(*n, *m, *trials, &[InitVariant::tanh(), InitVariant::truncated()], g.seed.unwrap_or(0), exec)?;
            for s in &table.summary {
                eprintln!(
                    "{}: mean rel_error {:.4} (var {:.2e}), mean correlation {:.4} (var {:.2e})",
                    s.method, s.mean_rel_error, s.var_rel_error, s.mean_correlation, s.var_correlation
                );
            }
            let mut w = open_out(out)?;
            match g.format {
                Format::Csv => table.write_csv(&mut w)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&table).map_err(io::Error::other)?)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Solve { n, m, rule, init, steps, step_size, momentum, record_every } => {
            let mut spec = MethodSpec::parse(&format!("{rule}/{init}"), &format!("{rule}/{init}"))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(s) = steps {
                spec.opts.steps = *s;
            }
            if let Some(s) = step_size {
                spec.opts.step_size = *s;
            }
            if let Some(mu) = momentum {
                spec.opts.momentum = *mu;
            }
            spec.opts.record_every = *record_every;
            spec.opts.execution = exec;
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let inst = ProblemInstance::generate(*n, *m, g.seed.unwrap_or(0), 1.0)?;
            let z0 = match spec.init {
                InitChoice::Oracle => inst.x().to_owned(),
                InitChoice::Spectral { variant, power_iters } => tanhwf::spectral_init(
                    &inst.measurements().with_execution(exec),
                    &tanhwf::InitMethod { variant, power_iters, seed: init_seed(inst.seed()) },
                )?,
            };
            let report = solve(&inst, z0.view(), &spec.rule, &spec.opts)?;
            eprintln!(
                "{}: min rel_error {:.3e} after {} iterations, success = {}",
                report.rule, report.min_rel_error, report.iterations_run, report.success
            );
            let mut w = open_out(out)?;
            match g.format {
                Format::Json => writeln!(w, "{}", report.to_json())?,
                Format::Csv => {
                    writeln!(w, "# rule={} seed={} success={}", report.rule, report.instance_seed, report.success)?;
                    writeln!(w, "iteration,rel_error")?;
                    for p in &report.trajectory {
                        writeln!(w, "{},{}", p.iteration, p.rel_error)?;
                    }
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Contour { n_min, n_max } => {
            let (rho, cos) = BoundGrid::default_axes();
            let grid = bound_contour(&rho, &cos, *n_min, *n_max, exec).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut w = open_out(out)?;
            match g.format {
                Format::Csv => grid.write_csv(&mut w)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string(&grid).map_err(io::Error::other)?)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::BoundsCheck { samples } => bounds_check(g, *samples, exec),
        Command::SupF => {
            let s = sup_case_weight();
            let mut w = open_out(out)?;
            match g.format {
                Format::Csv => writeln!(w, "sup_f,argmax\n{},{}", s.value, s.argmax)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string(&s).map_err(io::Error::other)?)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::SpectralBounds { alpha, beta, samples } => {
            let inputs = SpectralBoundInputs { alpha: *alpha, beta: *beta };
            let usage = |e: tanhwf::Error| Failure::Usage(e.to_string());
            let gap = spectral_gap_lower_bound(&inputs).map_err(usage)?;
            let lam = spectral_lambda1_upper_bound(*alpha).map_err(usage)?;
            let mc = spectral_expectation_mc(&inputs, *samples, g.seed.unwrap_or(0), exec).map_err(usage)?;
            let mut w = open_out(out)?;
            match g.format {
                Format::Csv => {
                    writeln!(w, "quantity,closed_form,mc_estimate,mc_std_error")?;
                    writeln!(w, "gap_lower_bound,{gap},{},{}", mc.gap.estimate, mc.gap.std_error)?;
                    writeln!(w, "lambda1_upper_bound,{lam},{},{}", mc.lambda1.estimate, mc.lambda1.std_error)?;
                }
                Format::Json => {
                    let v = serde_json::json!({
                        "alpha": alpha, "beta": beta,
                        "gap_lower_bound": gap, "lambda1_upper_bound": lam, "mc": mc,
                    });
                    writeln!(w, "{}", serde_json::to_string_pretty(&v).map_err(io::Error::other)?)?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn bench(g: &Global, exec: Execution) -> Outcome {
    let path = g.config.as_deref().ok_or_else(|| Failure::Usage("bench needs --config PATH".into()))?;
    let mut cfg =
        BenchConfig::from_file(path).map_err(|e| Failure::Usage(format!("cannot load {}: {e}", path.display())))?;
    if let Some(s) = g.seed {
        cfg.base_seed = s;
    }
    if g.threads > 0 {
        cfg.threads = g.threads;
    }
    log::info!(
        "bench: n={} m={:?} trials={} methods={}",
        cfg.n,
        cfg.m_list,
        cfg.trials,
        cfg.methods.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join(",")
    );
    let result = run_bench(&cfg, exec)?;
    let mut w = open_out(g.out.as_deref())?;
    match g.format {
        Format::Csv => result.write_csv(&mut w)?,
        Format::Json => writeln!(w, "{}", result.to_json())?,
    }
    w.flush()?;
    Ok(())
}

fn bounds_check(g: &Global, samples: usize, exec: Execution) -> Outcome {
    let seed = g.seed.unwrap_or(0);
    let mut w = open_out(g.out.as_deref())?;
    writeln!(w, "# samples={samples} seed={seed}")?;
    writeln!(w, "rho,cos_theta,quad,dyadic_bound,mc_estimate,mc_std_error,bound_ok,mc_ok")?;
    let mut failures = 0;
    for (k, pt) in validation_grid().iter().enumerate() {
        let q = curvature_expectation_quad(pt)?;
        let b = dyadic_upper_bound(pt, -20, 20)?;
        let mc = curvature_expectation_mc(pt, samples, seed.wrapping_add(k as u64), exec)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let bound_ok = b >= q;
        let mc_ok = (mc.estimate - q).abs() <= 4.0 * mc.std_error;
        failures += usize::from(!bound_ok) + usize::from(!mc_ok);
        writeln!(
            w,
            "{},{},{q},{b},{},{},{bound_ok},{mc_ok}",
            pt.rho, pt.cos_theta, mc.estimate, mc.std_error
        )?;
    }
    w.flush()?;
    eprintln!("bounds-check: {failures} failed checks over 25 grid points");
    Ok(())
}
