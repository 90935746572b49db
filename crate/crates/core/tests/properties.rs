use tanhwf::bench::{run_bench, BenchConfig};
use tanhwf::init::random_unit;
use tanhwf::linalg::norm;
use tanhwf::{make_instance, relative_error, solve, spectral_init, Execution, FlowRule, InitMethod, SolveOptions};

#[test]
fn plain_gradient_contracts_near_the_signal() {
    let opts = SolveOptions { steps: 50, step_size: 0.02, momentum: 0.0, record_every: 1, ..SolveOptions::tanh() };
    for seed in 0..20 {
        let inst = make_instance(100, 800, 500 + seed, 1.0).unwrap();
        let x = inst.x();
        let z0 = &x + &(random_unit(100, 9000 + seed) * (0.05 * norm(x)));
        let report = solve(&inst, z0.view(), &FlowRule::TanhWFL, &opts).unwrap();
        assert!(!report.aborted);
        assert_eq!(report.trajectory.len(), 50);
        let mut prev = relative_error(z0.view(), x).unwrap().rel_error;
        for p in &report.trajectory {
            assert!(p.rel_error <= prev + 1e-12, "seed {seed}: error rose at iteration {}", p.iteration);
            prev = p.rel_error;
        }
        assert!(prev < 0.05);
    }
}

#[test]
fn success_rate_grows_with_sample_count() {
    let rate = |m: usize| {
        let cfg = BenchConfig::parse(&format!(
            "n = 200\nm = {m}\ntrials = 50\nbase_seed = 7\nrecord_every = 10\nsteps = 1500\nmethod = tanhwfl/tanh\n"
        ))
        .unwrap();
        run_bench(&cfg, Execution::default()).unwrap().rows[0].success_rate
    };
    let (low, high) = (rate(240), rate(600));
    assert!(high - low >= 0.3, "m=600: {high}, m=240: {low}");
}

#[test]
fn tanh_init_on_a_mid_sized_instance() {
    let inst = make_instance(100, 300, 31, 1.0).unwrap();
    let z = spectral_init(&inst.measurements(), &InitMethod::tanh(5)).unwrap();
    let stats = relative_error(z.view(), inst.x()).unwrap();
    assert!((0.5..=1.05).contains(&stats.rel_error), "{}", stats.rel_error);
}
