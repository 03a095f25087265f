use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use slopekit::lattice::enumerate::fincke_pohst;
use slopekit::lattice::{hn_flag, LatticeOptions, DEFAULT_BUDGET};
use slopekit::linalg::QMat;
use slopekit::models::random_lattice;
use slopekit::real::Rational;

fn hn(c: &mut Criterion) {
    let opts = LatticeOptions::default();
    let mut g = c.benchmark_group("hn_flag");
    for rank in [2usize, 3, 4] {
        let ls: Vec<_> = (0..16).map(|s| random_lattice(rank, 5, s).unwrap()).collect();
        g.bench_with_input(BenchmarkId::from_parameter(rank), &ls, |b, ls| {
            b.iter(|| {
                for l in ls {
                    black_box(hn_flag(l, &opts).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let gram = QMat::from_i64_rows(&[vec![2, 1, 0, 0], vec![1, 2, 1, 0], vec![0, 1, 2, 1], vec![0, 0, 1, 2]]);
    let mut g = c.benchmark_group("fincke_pohst_a4");
    for bound in [4i64, 8, 16] {
        let r = Rational::from_integer(bound.into());
        g.bench_with_input(BenchmarkId::from_parameter(bound), &r, |b, r| {
            b.iter(|| black_box(fincke_pohst(&gram, r, DEFAULT_BUDGET, true).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, hn, enumeration);
criterion_main!(benches);
