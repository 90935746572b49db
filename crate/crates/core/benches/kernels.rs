use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tanhwf::init::random_unit;
use tanhwf::{make_instance, spectral_init, Execution, FlowRule, InitMethod, RtanhParams, TwfParams};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::default())]
}

fn gradients(c: &mut Criterion) {
    let inst = make_instance(1000, 2000, 1, 1.0).unwrap();
    let z = random_unit(1000, 2);
    let rules = [
        FlowRule::TanhWFL,
        FlowRule::RTanhWFL(RtanhParams::default()),
        FlowRule::Twf(TwfParams::default()),
    ];
    let mut group = c.benchmark_group("gradient_n1000_m2000");
    for rule in rules {
        for (mode, exec) in modes() {
            let meas = inst.measurements().with_execution(exec);
            group.bench_function(BenchmarkId::new(rule.name(), mode), |b| {
                b.iter(|| rule.gradient(&meas, black_box(z.view()), 100).unwrap())
            });
        }
    }
    group.finish();
}

fn initialization(c: &mut Criterion) {
    let inst = make_instance(500, 1000, 3, 1.0).unwrap();
    let method = InitMethod::tanh(4);
    let mut group = c.benchmark_group("tanh_spectral_n500_m1000");
    group.sample_size(10);
    for (mode, exec) in modes() {
        let meas = inst.measurements().with_execution(exec);
        group.bench_function(mode, |b| b.iter(|| spectral_init(&meas, black_box(&method)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, gradients, initialization);
criterion_main!(benches);
