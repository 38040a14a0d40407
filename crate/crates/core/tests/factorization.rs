use bary_core::corpus::named_table;
use bary_core::factorization::{
    check_string_properties, factorize_awqri, factorize_general, quasi_inverse, verify_factorization, FactorError,
    FiniteFn, Inner, QuasiInverse, StringFunction,
};
use bary_core::words::word_at;
use bary_core::{builtin, Alphabet, CheckDomain, PropertyId, Status, Value, VariadicOp, Word};
use serde_json::json;

fn ints(xs: &[i64]) -> Vec<Value> {
    xs.iter().map(|&x| Value::Int(x)).collect()
}

fn fmap(pairs: &[(i64, i64)]) -> FiniteFn {
    FiniteFn::new(pairs.iter().map(|&(x, y)| (Value::Int(x), Value::Int(y))).collect()).unwrap()
}

fn sum_mod_5() -> VariadicOp {
    builtin("sum-mod", json!({"modulus": 5}).as_object().unwrap()).unwrap()
}

fn all_words(letters: &[Value], n: usize) -> Vec<Word> {
    (0..(letters.len() as u64).pow(n as u32)).map(|i| word_at(letters, n, i)).collect()
}

#[test]
fn quasi_inverse_takes_first_preimage() {
    let f = fmap(&[(0, 7), (1, 8), (2, 7), (3, 9)]);
    let g = quasi_inverse(&f);
    assert_eq!(g.g.domain(), &ints(&[7, 8, 9])[..]);
    assert_eq!(g.g.apply(&Value::Int(7)), Some(&Value::Int(0)));
    assert!(g.is_quasi_inverse_of(&f).is_ok());
    let other = QuasiInverse { g: fmap(&[(7, 2), (8, 1), (9, 3)]) };
    assert!(other.is_quasi_inverse_of(&f).is_ok());
    let wrong = QuasiInverse { g: fmap(&[(7, 1), (8, 1), (9, 3)]) };
    assert!(wrong.is_quasi_inverse_of(&f).is_err());
    let short = QuasiInverse { g: fmap(&[(7, 0), (8, 1)]) };
    assert!(short.is_quasi_inverse_of(&f).is_err());
}

#[test]
fn finite_maps_reject_duplicate_keys_and_report_collisions() {
    let dup = FiniteFn::new(vec![(Value::Int(1), Value::Int(0)), (Value::Int(1), Value::Int(2))]);
    assert_eq!(dup.unwrap_err(), FactorError::DuplicateKey(Value::Int(1)));
    assert_eq!(fmap(&[(0, 4), (1, 5), (2, 4)]).collision(), Some((Value::Int(0), Value::Int(2), Value::Int(4))));
    assert_eq!(fmap(&[(0, 4), (1, 5)]).collision(), None);
}

#[test]
fn sum_mod_five_factors_through_mean_mod_five() {
    let f = sum_mod_5();
    let fact = factorize_awqri(&f, 4, None).unwrap();
    assert_eq!(fact.max_arity, 4);
    let Inner::Op(h) = &fact.h else { panic!("expected an operation") };
    let letters = ints(&[0, 1, 2, 3, 4]);
    // n⁻¹ mod 5 for n = 1..4.
    let inv = [1, 3, 2, 4];
    for n in 1..=4 {
        for c in 0..5 {
            assert_eq!(fact.f[n - 1].apply(&Value::Int(c)), Some(&Value::Int(n as i64 * c % 5)), "f_{n}({c})");
        }
        for x in all_words(&letters, n) {
            let s: i64 = x.letters().iter().map(|v| if let Value::Int(i) = v { *i } else { unreachable!() }).sum();
            assert_eq!(h.evaluate(&x).unwrap(), Value::Int(inv[n - 1] * s % 5), "H({x})");
        }
    }
    let v = verify_factorization(&f, &fact, &CheckDomain::exhaustive(4), true).unwrap();
    assert!(v.passed(), "{v}");
    assert_eq!(fact.certified_strong, Some(true));
}

#[test]
fn corrupted_outer_map_is_caught() {
    let f = sum_mod_5();
    let mut fact = factorize_awqri(&f, 3, None).unwrap();
    let swapped: Vec<(Value, Value)> = fact.f[1]
        .pairs()
        .map(|(x, y)| {
            let y = match y {
                Value::Int(1) => Value::Int(2),
                Value::Int(2) => Value::Int(1),
                other => other.clone(),
            };
            (x.clone(), y)
        })
        .collect();
    fact.f[1] = FiniteFn::new(swapped).unwrap();
    let v = verify_factorization(&f, &fact, &CheckDomain::exhaustive(3), false).unwrap();
    assert!(!v.passed());
    assert_eq!(v.checks[0].status, Status::Fails);
    assert_eq!(v.checks[1].status, Status::Holds);

    let mut fact = factorize_awqri(&f, 3, None).unwrap();
    fact.f[2] = FiniteFn::new(fact.f[2].pairs().map(|(x, _)| (x.clone(), Value::Int(0))).collect()).unwrap();
    let v = verify_factorization(&f, &fact, &CheckDomain::exhaustive(3), false).unwrap();
    assert_eq!(v.checks[1].status, Status::Fails);
}

#[test]
fn verification_needs_covered_arities() {
    let f = sum_mod_5();
    let fact = factorize_awqri(&f, 2, None).unwrap();
    assert!(matches!(
        verify_factorization(&f, &fact, &CheckDomain::exhaustive(3), false),
        Err(FactorError::Coverage { requested: 3, covered: 2 })
    ));
}

#[test]
fn explicit_quasi_inverses_are_validated() {
    let f = sum_mod_5();
    let bad = vec![QuasiInverse { g: fmap(&[(0, 1), (1, 0), (2, 2), (3, 3), (4, 4)]) }];
    assert!(matches!(factorize_awqri(&f, 1, Some(&bad)), Err(FactorError::InvalidQuasiInverse { arity: 1, .. })));
}

#[test]
fn non_preassociative_tables_are_refused_with_a_witness() {
    let f = named_table("non-preassoc-random").unwrap();
    match factorize_awqri(&f, 4, None) {
        Err(FactorError::Precondition { property, witness }) => {
            assert_eq!(property, PropertyId::BPreassoc);
            assert!(witness.is_some());
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(factorize_general(&f, 4), Err(FactorError::Precondition { .. })));
}

#[test]
fn real_domains_are_not_finite() {
    let f = builtin("arith-mean", &Default::default()).unwrap();
    assert!(matches!(factorize_general(&f, 3), Err(FactorError::NotFinite(_))));
}

#[test]
fn length_factors_through_a_constant_string_function() {
    let f = named_table("length-like").unwrap();
    let fact = factorize_general(&f, 4).unwrap();
    let Inner::Strings(h) = &fact.h else { panic!("expected a string function") };
    let letters = f.alphabet().unwrap().letters().to_vec();
    for n in 1..=4 {
        let first = h.apply(&all_words(&letters, n)[0]).unwrap().clone();
        assert_eq!(first.len(), n);
        for x in all_words(&letters, n) {
            assert_eq!(h.apply(&x), Some(&first));
        }
    }
    let v = verify_factorization(&f, &fact, &CheckDomain::exhaustive(4), fact.certified_strong.is_some()).unwrap();
    assert!(v.passed(), "{v}");
}

#[test]
fn identity_lift_factors_through_the_identity() {
    let f = named_table("identity-lift").unwrap();
    let fact = factorize_general(&f, 4).unwrap();
    let Inner::Strings(h) = &fact.h else { panic!() };
    let letters = f.alphabet().unwrap().letters().to_vec();
    for n in 1..=4 {
        for x in all_words(&letters, n) {
            assert_eq!(h.apply(&x), Some(&x));
        }
    }
    assert_eq!(fact.certified_strong, Some(true));
}

#[test]
fn first_projection_general_factorization_verifies() {
    let f = named_table("first-projection").unwrap();
    let fact = factorize_general(&f, 4).unwrap();
    let v = verify_factorization(&f, &fact, &CheckDomain::exhaustive(4), true).unwrap();
    assert!(v.passed(), "{v}");
    assert!(!v.theorem_contradiction);
}

#[test]
fn string_function_checks() {
    let ab = Alphabet::syms("ab");
    let id = check_string_properties(&StringFunction::identity(ab.clone(), 4), 4).unwrap();
    assert_eq!(id.associative.status, Status::Holds);
    assert_eq!(id.length_preserving.status, Status::Holds);
    assert_eq!(id.strongly_b_preassociative.status, Status::Holds);

    let sorted = check_string_properties(&StringFunction::sort_letters(ab.clone(), 4), 4).unwrap();
    assert_eq!(sorted.associative.status, Status::Holds);
    assert_eq!(sorted.length_preserving.status, Status::Holds);

    let dropped = check_string_properties(&StringFunction::drop_last(ab, 4), 4).unwrap();
    assert_eq!(dropped.length_preserving.status, Status::Fails);
}
