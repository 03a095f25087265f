use criterion::{black_box, criterion_group, criterion_main, Criterion};

use slopekit::graded::{asymptotic_trace, volume_estimate};
use slopekit::models::{build, oracle, ModelSpec};
use slopekit::real::Rational;

fn p1_trace(c: &mut Criterion) {
    let spec = ModelSpec::TwoSided {
        a: Rational::from_integer(1.into()),
        b: Rational::from_integer((-1).into()),
    };
    let b = build(&spec).unwrap().series().unwrap();
    let reference = oracle(&spec).unwrap().limit.unwrap().to_reference();
    c.bench_function("trace_two_sided_n400", |bn| {
        bn.iter(|| black_box(asymptotic_trace(&b, &[400], Some(&reference)).unwrap()))
    });
    c.bench_function("volume_estimate_two_sided", |bn| {
        bn.iter(|| black_box(volume_estimate(&b, &[50, 100, 200, 400]).unwrap()))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = p1_trace
}
criterion_main!(benches);
