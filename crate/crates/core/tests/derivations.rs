mod common;

use std::collections::BTreeSet;

use kripke_core::axiomatic::{mlk_regression_suite, DerivationErrorKind};
use kripke_core::tableau::{decide_verdict, Verdict};
use kripke_core::{
    check_derivation, deduction_transform, oracle_verdict, Formula, Justification, Logic,
    DEFAULT_MAX_STEPS,
};
use rand::Rng;

#[test]
fn generated_derivations_check_and_discharge() {
    let mut rng = common::rng(11);
    for l in Logic::ALL {
        for _ in 0..100 {
            let b = common::random_formula(&mut rng, &["p", "q"], 3, false);
            let d = common::random_derivation(&mut rng, l, std::slice::from_ref(&b), 10, 2);
            let goal = d.conclusion().unwrap().clone();
            let hb = BTreeSet::from([b.clone()]);
            check_derivation(l, &hb, &d, &goal).unwrap();
            let out = deduction_transform(l, &BTreeSet::new(), &b, &d).unwrap();
            check_derivation(l, &BTreeSet::new(), &out, &Formula::imp(b.clone(), goal)).unwrap();
        }
    }
}

#[test]
fn redirected_references_are_rejected() {
    let mut rng = common::rng(12);
    let mut seen = 0;
    for _ in 0..200 {
        let mut d = common::random_derivation(&mut rng, Logic::K, &[], 12, 0);
        let Some(k) = d.steps.iter().position(|s| matches!(s.by, Justification::MP(..))) else {
            continue;
        };
        let Justification::MP(i, _) = d.steps[k].by else { unreachable!() };
        d.steps[k].by = Justification::MP(i, k + rng.random_range(0..3));
        let goal = d.conclusion().unwrap().clone();
        let err = check_derivation(Logic::K, &BTreeSet::new(), &d, &goal).unwrap_err();
        assert_eq!(err.path, vec![k]);
        assert_eq!(err.kind, DerivationErrorKind::ForwardReference);
        seen += 1;
    }
    assert!(seen > 50);
}

#[test]
fn derived_lemmas_are_semantic_theorems() {
    for (name, l, d) in mlk_regression_suite() {
        let goal = d.conclusion().unwrap();
        assert_eq!(decide_verdict(l, goal, DEFAULT_MAX_STEPS), Verdict::Theorem, "{name}");
        assert!(oracle_verdict(l, goal).unwrap().is_theorem(), "{name}");
    }
}

#[test]
fn oracle_handles_diamonds() {
    let mut rng = common::rng(13);
    for _ in 0..300 {
        let size = rng.random_range(1..=6);
        let f = common::random_formula(&mut rng, &["p", "q"], size, true);
        for l in Logic::ALL {
            let v = decide_verdict(l, &f, DEFAULT_MAX_STEPS);
            let Ok(o) = oracle_verdict(l, &f) else { continue };
            if v != Verdict::Undetermined {
                assert_eq!(v == Verdict::Theorem, o.is_theorem(), "{f} in {l}");
            }
        }
    }
}
