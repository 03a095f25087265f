//! Every closed-form oracle value is reproduced by the estimators at degree 400.

use num_traits::ToPrimitive;

use slopekit::graded::{arithmetic_volume_estimate, asymptotic_trace, volume_estimate, volume_identity_check};
use slopekit::models::{build, oracle, ModelSpec};
use slopekit::real::rational;

const DEGREES: [usize; 4] = [50, 100, 200, 400];

fn specs() -> Vec<ModelSpec> {
    vec![
        ModelSpec::WeightedP1 { lambda: rational(1, 1) },
        ModelSpec::WeightedP1 { lambda: rational(5, 2) },
        ModelSpec::ConstantTwist { lambda: rational(1, 2) },
        ModelSpec::ConstantTwist { lambda: rational(2, 1) },
        ModelSpec::TwoSided {
            a: rational(1, 1),
            b: rational(-1, 1),
        },
        ModelSpec::TwoSided {
            a: rational(2, 1),
            b: rational(-1, 1),
        },
        ModelSpec::WeightedPn {
            n: 1,
            weights: vec![rational(1, 2), rational(3, 2)],
        },
    ]
}

#[test]
fn estimators_match_oracles() {
    for spec in specs() {
        let o = oracle(&spec).unwrap();
        let b = build(&spec).unwrap().series().unwrap();
        let vol = volume_estimate(&b, &DEGREES).unwrap();
        assert!((vol.estimate - o.vol.to_f64().unwrap()).abs() < 0.03, "{spec:?} vol {}", vol.estimate);
        let vh = arithmetic_volume_estimate(&b, &DEGREES).unwrap().estimate;
        let target = o.vol_hat.to_f64().unwrap();
        assert!((vh - target).abs() <= 0.03 * target.max(1.0), "{spec:?} vol̂ {vh} vs {target}");
        let reference = o.limit.as_ref().unwrap().to_reference();
        let tr = asymptotic_trace(&b, &DEGREES, Some(&reference)).unwrap();
        let last = tr.last().unwrap();
        assert!(last.cdf_distance.unwrap() <= 0.02, "{spec:?}");
        let mu = o.mu_pi_max.to_f64().unwrap();
        assert!((last.lambda_max_over_n.unwrap() - mu).abs() < 0.03 * mu.abs().max(1.0), "{spec:?}");
        let e = volume_identity_check(&b, &DEGREES, 0.02).unwrap();
        assert!(e.passed(), "{spec:?} {e:?}");
    }
}

#[test]
fn trace_distances_decrease() {
    let b = build(&ModelSpec::WeightedP1 { lambda: rational(1, 1) }).unwrap().series().unwrap();
    let tr = asymptotic_trace(&b, &DEGREES, Some(&slopekit::measure::Reference::Uniform { lo: 0.0, hi: 1.0 })).unwrap();
    let d: Vec<f64> = tr.records.iter().map(|r| r.cdf_distance.unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}
