use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pfg_core::generators::{cournot_family, CournotParams};
use pfg_core::harness::{verify_proposition, VerifyConfig, VerifyMode};
use pfg_core::par::Execution;

fn verify(c: &mut Criterion) {
    let f = cournot_family(&CournotParams::unit(), 7).unwrap();
    let mut group = c.benchmark_group("verify_cournot_n7");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let mut cfg = VerifyConfig::new(VerifyMode::Prop1, 16, 1);
        cfg.execution = exec;
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| verify_proposition(&f, "cournot", cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, verify);
criterion_main!(benches);
