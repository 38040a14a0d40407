use bary_core::means::{
    extract_generator, extract_generator_refined, psi_build, psi_mean_check, psi_refine, Generator, Interpolant,
    Interpolation, MeanError, QuasiArithmeticPreMean,
};
use bary_core::{builtin, Execution, Interval, VariadicOp, Word};
use proptest::prelude::*;
use serde_json::json;

fn op(name: &str, params: serde_json::Value) -> VariadicOp {
    builtin(name, params.as_object().unwrap()).unwrap()
}

fn closed(lo: f64, hi: f64) -> Interval {
    Interval::closed(lo, hi).unwrap()
}

proptest! {
    #[test]
    fn quasi_arithmetic_means_are_internal_and_symmetric(
        xs in prop::collection::vec(0.5f64..2.0, 1..6),
        g in prop::sample::select(vec!["identity", "ln", "square", "reciprocal", "cube"]),
    ) {
        let m = QuasiArithmeticPreMean::mean(Generator::named(g).unwrap());
        let v = m.evaluate(&xs).unwrap();
        let (lo, hi) = xs.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        let mut rev = xs.clone();
        rev.reverse();
        prop_assert!((m.evaluate(&rev).unwrap() - v).abs() <= 1e-12);
    }

    #[test]
    fn affine_generators_give_the_same_mean(
        xs in prop::collection::vec(0.5f64..2.0, 1..6),
        r in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        s in -10.0f64..10.0,
    ) {
        let g = Generator::named("ln").unwrap();
        let a = QuasiArithmeticPreMean::mean(g.clone()).evaluate(&xs).unwrap();
        let b = QuasiArithmeticPreMean::mean(g.affine(r, s).unwrap()).evaluate(&xs).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn interpolant_inverse_round_trips(
        steps in prop::collection::vec(0.01f64..1.0, 2..40),
        t in 0.0f64..1.0,
        cubic in any::<bool>(),
    ) {
        let mut values = vec![0.0];
        for s in &steps {
            values.push(values.last().unwrap() + s);
        }
        let kind = if cubic { Interpolation::MonotoneCubic } else { Interpolation::Linear };
        let p = Interpolant::new(values, kind).unwrap();
        let x = p.eval(t);
        prop_assert!((p.inverse(x) - t).abs() <= 1e-9);
    }
}

#[test]
fn psi_of_the_arithmetic_mean_is_linear() {
    let f = op("arith-mean", json!({}));
    let t = psi_build(&f, &Word::reals(&[2.0]), &Word::reals(&[6.0]), 8, 1e-12, Execution::default()).unwrap();
    for p in 0..=8 {
        assert!((t.at(p) - (2.0 + 4.0 * p as f64 / 8.0)).abs() < 1e-14);
    }
    assert!(t.warnings.is_empty());
    assert_eq!(t.first_non_increase(), None);
}

#[test]
fn refinement_agrees_with_a_finer_grid() {
    let f = op("geometric-mean", json!({}));
    let (a, b) = (Word::reals(&[1.0]), Word::reals(&[3.0]));
    let coarse = psi_build(&f, &a, &b, 16, 1e-12, Execution::default()).unwrap();
    let refined = psi_refine(&f, &coarse, 2, Execution::Sequential).unwrap();
    let fine = psi_build(&f, &a, &b, 64, 1e-12, Execution::default()).unwrap();
    assert_eq!(refined.q, 64);
    for p in 0..=64 {
        assert!((refined.at(p) - fine.at(p)).abs() < 1e-13, "{p}");
    }
}

#[test]
fn psi_identity_fails_for_a_weighted_mean() {
    let f = op("weighted-pow2", json!({}));
    let t = psi_build(&f, &Word::reals(&[0.0]), &Word::reals(&[1.0]), 8, 1e-12, Execution::default()).unwrap();
    let c = psi_mean_check(&f, &t, 3, 1_000_000, 1e-9, 1).unwrap();
    assert!(!c.holds);
    let w = c.witness.unwrap();
    assert!(w.residual > 1e-9);
}

#[test]
fn power_mean_extracts_its_power() {
    let f = op("power-mean", json!({"exponent": 2.0}));
    let iv = closed(1.0, 3.0);
    let x = extract_generator(&f, &iv, 512, Interpolation::Linear, Execution::default()).unwrap();
    // f̂ is x² rescaled so that f̂(1) = 0 and f̂(3) = 1.
    for k in 0..=20 {
        let v = 1.0 + 2.0 * k as f64 / 20.0;
        assert!((x.f_hat(v) - (v * v - 1.0) / 8.0).abs() < 1e-5, "{v}");
    }
    assert!(x.residuals(&f, 4, 300, 9).unwrap().max < 1e-5);
}

#[test]
fn refinement_tightens_the_reconstruction() {
    let f = op("geometric-mean", json!({}));
    let iv = closed(1.0, 8.0);
    let plain = extract_generator(&f, &iv, 64, Interpolation::Linear, Execution::default()).unwrap();
    let fine = extract_generator_refined(&f, &iv, 64, 3, Interpolation::Linear, Execution::default()).unwrap();
    let (a, b) = (plain.residuals(&f, 4, 300, 2).unwrap().max, fine.residuals(&f, 4, 300, 2).unwrap().max);
    assert!(b < a / 10.0, "{a} vs {b}");
}

#[test]
fn extraction_refuses_non_means() {
    let iv = closed(0.0, 1.0);
    let constant = op("first-projection", json!({"interval": [0.0, 1.0]}));
    let min = op("min", json!({"interval": [0.0, 1.0]}));
    match extract_generator(&min, &iv, 16, Interpolation::Linear, Execution::default()) {
        Err(MeanError::PsiNotIncreasing { .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(extract_generator(&constant, &iv, 16, Interpolation::Linear, Execution::default()).is_err());
    assert!(matches!(
        extract_generator(&min, &Interval::positive(), 16, Interpolation::Linear, Execution::default()),
        Err(MeanError::NotClosedBounded(_))
    ));
}
