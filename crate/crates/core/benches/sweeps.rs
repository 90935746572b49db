use criterion::{criterion_group, criterion_main, Criterion};
use tanhwf::analysis::{bound_contour, curvature_expectation_mc, linspace, GeometryPoint};
use tanhwf::bench::{run_bench, BenchConfig};
use tanhwf::Execution;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::default())]
}

fn contour(c: &mut Criterion) {
    let rho = linspace(0.05, 1.0, 20);
    let cos = linspace(-0.95, 0.95, 20);
    let mut group = c.benchmark_group("bound_contour_20x20");
    group.sample_size(10);
    for (mode, exec) in modes() {
        group.bench_function(mode, |b| b.iter(|| bound_contour(&rho, &cos, -20, 20, exec).unwrap()));
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let pt = GeometryPoint::new(0.5, 0.4).unwrap();
    let mut group = c.benchmark_group("curvature_mc_1e6");
    group.sample_size(10);
    for (mode, exec) in modes() {
        group.bench_function(mode, |b| b.iter(|| curvature_expectation_mc(&pt, 1_000_000, 1, exec).unwrap()));
    }
    group.finish();
}

fn small_sweep(c: &mut Criterion) {
    let cfg = BenchConfig::parse(
        "n = 60\nm = 150, 240\ntrials = 8\nbase_seed = 1\nsteps = 300\nmethod = tanhwfl/tanh\nmethod = twf/truncated\n",
    )
    .unwrap();
    let mut group = c.benchmark_group("run_bench_small");
    group.sample_size(10);
    for (mode, exec) in modes() {
        group.bench_function(mode, |b| b.iter(|| run_bench(&cfg, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, contour, monte_carlo, small_sweep);
criterion_main!(benches);
