//! Brute-force oracle scaling: the Gray-code sweep visits 2^n points with
//! O(1) amortized row updates, so wall time should roughly double per vertex.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rhombus_core::gen::{generate_planted_yes, PlantSpec};
use rhombus_core::graph::GapSpec;
use rhombus_core::lattice::CvpInstance;
use rhombus_core::oracle::{brute_binary_cvp, brute_boxed_cvp};
use rhombus_core::reduce::{reduce_auto, ReductionMode, ReductionParams};
use rhombus_core::Rat;

fn rat(a: i64, b: i64) -> Rat {
    Rat::new(a.into(), b.into())
}

fn planted_instance(n: usize, seed: u64) -> CvpInstance {
    let gap = GapSpec::new(rat(1, 4), rat(1, 2), rat(1, 1)).unwrap();
    let spec = PlantSpec {
        n,
        m: 2 * n,
        gap: gap.clone(),
        seed,
        w_max: rat(1, 1),
    };
    let g = generate_planted_yes(&spec).unwrap();
    let params = ReductionParams::new(rat(2, 1), ReductionMode::Unweighted).unwrap();
    reduce_auto(&g, &gap, &params).unwrap()
}

fn bench_binary_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("binary_sweep");
    for n in [10usize, 12, 14, 16] {
        let inst = planted_instance(n, 0xB0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| brute_binary_cvp(inst).unwrap())
        });
    }
    group.finish();
}

fn bench_boxed_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("boxed_sweep");
    for n in [6usize, 7, 8] {
        let inst = planted_instance(n, 0xB1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| brute_boxed_cvp(inst, -2, 3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_binary_sweep, bench_boxed_sweep);
criterion_main!(benches);
