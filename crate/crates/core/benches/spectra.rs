use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use endospec::exec::Execution;
use endospec::linalg::restriction_matrix;
use endospec::selftest::{self, DEFAULT_SEED};
use endospec::subgroups::{mod_n_homology_kernel, random_endomorphism, RandomSpec};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new("containment", name), &mode, |b, &m| {
            b.iter(|| selftest::theorem_suite(DEFAULT_SEED, 6, m))
        });
        group.bench_with_input(BenchmarkId::new("eventual_kernel", name), &mode, |b, &m| {
            b.iter(|| selftest::lemma_suite(DEFAULT_SEED, 200, m))
        });
        group.bench_with_input(BenchmarkId::new("structure", name), &mode, |b, &m| {
            b.iter(|| selftest::structural_suite(DEFAULT_SEED, 100, m))
        });
    }
    group.finish();
}

fn char_poly(c: &mut Criterion) {
    let mut group = c.benchmark_group("char_poly");
    group.sample_size(10);
    for (rank, modulus) in [(2, 3), (3, 3), (2, 9)] {
        let h = mod_n_homology_kernel(rank, modulus).unwrap();
        let phi = random_endomorphism(&RandomSpec {
            seed: 5,
            rank,
            max_image_length: 6,
            move_count: 0,
        });
        let m = restriction_matrix(&phi, &h).unwrap();
        group.bench_function(BenchmarkId::from_parameter(m.dim()), |b| {
            b.iter(|| m.char_poly())
        });
    }
    group.finish();
}

criterion_group!(benches, suites, char_poly);
criterion_main!(benches);
