use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cyclebound::manifest::{run_checks, Manifest, RunOptions};
use cyclebound::par::Parallelism;

fn load(name: &str) -> Manifest {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.cb"));
    Manifest::load(&p).expect("fixture loads")
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_checks");
    group.sample_size(10);
    for name in ["total_five_spheres", "fifth_order_ode", "exterior_r4"] {
        let m = load(name);
        for (label, mode) in [
            ("parallel", Parallelism::Parallel),
            ("sequential", Parallelism::Sequential),
        ] {
            let opts = RunOptions {
                parallelism: mode,
                ..RunOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(label, name), &m, |b, m| {
                b.iter(|| run_checks(m, &opts, None).expect("checks run"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
