use bary_core::corpus::{named_table, random_corpus};
use bary_core::properties::{
    applicable_properties, replay, CheckError, Judgement, Slot, Witness, IMPLICATIONS,
};
use bary_core::{builtin, check_property, run_suite, CheckDomain, Execution, PropertyId, Status, Value, VariadicOp, Word};
use proptest::prelude::*;
use serde_json::json;

use PropertyId::*;

fn op(name: &str, params: serde_json::Value) -> VariadicOp {
    builtin(name, params.as_object().unwrap()).unwrap()
}

fn pow2_mean(xs: &[f64]) -> f64 {
    let num: f64 = xs.iter().enumerate().map(|(i, x)| 2f64.powi(i as i32) * x).sum();
    num / (2f64.powi(xs.len() as i32) - 1.0)
}

#[test]
fn weighted_mean_is_b_associative_but_not_strongly() {
    let f = op("weighted-pow2", json!({}));
    let dom = CheckDomain::sampled(2000, 3, 4);
    assert_eq!(check_property(BAssoc, &f, &dom).unwrap().status, Status::Holds);
    let v = check_property(StrongBAssocDef, &f, &dom).unwrap();
    assert_eq!(v.status, Status::Fails);
    let w = v.witness.unwrap();
    assert!(w.size <= 3);
    assert_eq!(replay(&f, &w, 1e-9).unwrap(), Judgement::Violated { lhs: w.lhs.clone(), rhs: w.rhs.clone() });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn def_judgement_matches_weight_formula(
        xs in prop::collection::vec(0.0f64..1.0, 2..=5),
        mask in 1u64..31,
    ) {
        let n = xs.len();
        let k: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        prop_assume!(!k.is_empty());
        let f = op("weighted-pow2", json!({}));
        let w = Witness::from_json(&json!({
            "property": "STRONG_B_ASSOC_DEF",
            "instance": {"x": xs, "K": k},
            "lhs": null, "rhs": null, "residual": null, "size": n
        })).unwrap();
        let m = pow2_mean(&k.iter().map(|&i| xs[i - 1]).collect::<Vec<_>>());
        let spliced: Vec<f64> = (1..=n).map(|i| if k.contains(&i) { m } else { xs[i - 1] }).collect();
        let gap = (pow2_mean(&xs) - pow2_mean(&spliced)).abs();
        match replay(&f, &w, 1e-9).unwrap() {
            Judgement::Holds => prop_assert!(gap <= 1e-9 + 1e-12),
            Judgement::Violated { .. } => prop_assert!(gap > 1e-9 - 1e-12),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}

#[test]
fn arithmetic_mean_passes_every_applicable_law() {
    let f = op("arith-mean", json!({}));
    let dom = CheckDomain::sampled(200, 11, 4);
    let props = applicable_properties(&f, &PropertyId::ALL, &dom);
    assert!(props.contains(&StrongBAssocDef));
    let r = run_suite(&f, &props, &dom).unwrap();
    for v in &r.verdicts {
        assert_eq!(v.status, Status::Holds, "{} {:?}", v.property, v.witness);
    }
    assert!(r.implications.iter().all(|i| !i.violated));
}

#[test]
fn length_is_strongly_b_preassociative() {
    let f = op("length", json!({"alphabet": ["a", "b"]}));
    let v = check_property(StrongBPreassocI, &f, &CheckDomain::exhaustive(5)).unwrap();
    assert_eq!(v.status, Status::Holds);
    assert!(v.exhaustive);
    assert_eq!(v.max_len, 5);
}

#[test]
fn first_projection_is_strong_but_not_symmetric() {
    let f = op("first-projection", json!({"alphabet": ["a", "b"]}));
    let dom = CheckDomain::exhaustive(2);
    assert_eq!(check_property(StrongBAssocDef, &f, &dom).unwrap().status, Status::Holds);
    let v = check_property(Symmetric, &f, &dom).unwrap();
    assert_eq!(v.status, Status::Fails);
    let w = v.witness.unwrap();
    assert_eq!(w.slot("x"), Some(&Slot::Word(Word::syms("ab"))));
    assert_eq!((w.lhs, w.rhs), (Value::sym("a"), Value::sym("b")));
}

#[test]
fn identity_lift_is_preassociative_but_not_inner_symmetric() {
    let f = op("identity-lift", json!({"alphabet": ["a", "b"]}));
    let dom = CheckDomain::exhaustive(4);
    assert_eq!(check_property(StrongBPreassocI, &f, &dom).unwrap().status, Status::Holds);
    let v = check_property(InnerSymmetric, &f, &dom).unwrap();
    assert_eq!(v.status, Status::Fails);
    assert_eq!(v.witness.unwrap().size, 4);
}

#[test]
fn sum_is_preassociative_on_sampled_reals() {
    let f = op("sum", json!({}));
    let dom = CheckDomain::sampled(500, 5, 4);
    for p in [BPreassoc, StrongBPreassocI] {
        assert_eq!(check_property(p, &f, &dom).unwrap().status, Status::Holds, "{p}");
    }
}

#[test]
fn closed_codomain_laws_refuse_external_codomains() {
    let f = op("sum", json!({}));
    let e = check_property(StrongBAssocDef, &f, &CheckDomain::sampled(10, 1, 3)).unwrap_err();
    assert!(matches!(e, CheckError::Inapplicable { property: StrongBAssocDef, .. }));
}

#[test]
fn range_laws_need_a_finite_domain() {
    let f = op("arith-mean", json!({}));
    let e = check_property(AwQuasiRangeIdempotent, &f, &CheckDomain::sampled(10, 1, 3)).unwrap_err();
    assert!(matches!(e, CheckError::Inapplicable { .. }));
}

#[test]
fn over_budget_exhaustive_runs_are_inconclusive() {
    let f = named_table("random").unwrap();
    let v = check_property(StrongBAssocDef, &f, &CheckDomain::exhaustive(4).with_budget(10)).unwrap();
    assert_eq!(v.status, Status::Inconclusive);
    assert!(v.note.unwrap().contains("max_len"));
    assert_eq!(v.instances_checked, 0);
}

#[test]
fn zero_length_bound_is_rejected() {
    let f = named_table("min").unwrap();
    assert!(matches!(
        check_property(BAssoc, &f, &CheckDomain::exhaustive(0)),
        Err(CheckError::DomainMismatch(_))
    ));
}

#[test]
fn implications_hold_across_the_corpus() {
    let dom = CheckDomain::exhaustive(4);
    for e in random_corpus(3, 60, 2, 4) {
        let props = applicable_properties(&e.op, &PropertyId::ALL, &dom);
        let r = run_suite(&e.op, &props, &dom).unwrap();
        for (premise, conclusion) in IMPLICATIONS {
            if r.status(premise) == Some(Status::Holds) {
                assert_ne!(r.status(conclusion), Some(Status::Fails), "{}: {premise} ⇒ {conclusion}", e.id);
            }
        }
    }
}

fn small_corpus() -> Vec<VariadicOp> {
    random_corpus(17, 24, 2, 3).into_iter().map(|e| e.op).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_do_not_depend_on_execution(i in 0usize..24, p in 0usize..20) {
        let f = &small_corpus()[i];
        let prop = PropertyId::ALL[p];
        let dom = CheckDomain::exhaustive(3);
        let par = check_property(prop, f, &dom);
        let seq = check_property(prop, f, &dom.clone().with_execution(Execution::Sequential));
        match (par, seq) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn witnesses_round_trip_and_replay(i in 0usize..24, p in 0usize..20) {
        let f = &small_corpus()[i];
        let prop = PropertyId::ALL[p];
        if let Ok(v) = check_property(prop, f, &CheckDomain::exhaustive(3)) {
            if let Some(w) = v.witness {
                let back = Witness::from_json(&w.to_json()).unwrap();
                prop_assert_eq!(&back, &w);
                let replayed = replay(f, &back, 1e-9).unwrap();
                prop_assert_eq!(replayed, Judgement::Violated { lhs: w.lhs.clone(), rhs: w.rhs.clone() });
            }
        }
    }

    #[test]
    fn sampled_verdicts_are_seed_deterministic(seed in any::<u64>()) {
        let f = op("weighted-pow2", json!({}));
        let dom = CheckDomain::sampled(50, seed, 3);
        let a = check_property(StrongBAssocDef, &f, &dom).unwrap();
        let b = check_property(StrongBAssocDef, &f, &dom.clone().with_execution(Execution::Sequential)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn malformed_witnesses_are_rejected() {
    let bad = [
        json!({"property": "NOPE", "instance": {}}),
        json!({"property": "STRONG_B_ASSOC_DEF", "instance": {"x": [1.0]}}),
        json!({"property": "STRONG_B_ASSOC_DEF", "instance": {"x": [1.0], "K": [2]}}),
        json!({"property": "SYMMETRIC", "instance": {"x": ["a"], "i": 1, "j": 2}}),
    ];
    for j in bad {
        assert!(matches!(Witness::from_json(&j), Err(CheckError::Witness(_))), "{j}");
    }
}
