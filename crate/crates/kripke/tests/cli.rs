use std::path::PathBuf;
use std::process::Command;

use kripke::json::{DerivationFile, DerivationInput, OutcomeJson, ProofJson};
use kripke_core::axiomatic::mlk_regression_suite;
use kripke_core::{holds, parse, replay_proof, KripkeModel, Logic};

fn kripke(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kripke")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn t_proves_box_box_a_implies_diam_a() {
    let (code, out, _) = kripke(&["decide", "--logic", "T", "Box (Box a --> Diam a)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Theorem of T"));
}

#[test]
fn k_countermodel_as_dot() {
    let (code, out, _) = kripke(&["countermodel", "--logic", "K", "Box (Box a --> Diam a)", "--format", "dot"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("digraph {"));
    assert!(out.contains("w0 -> w1;"));
    assert!(out.contains("w1 [label=\"w1: \"]"));
}

#[test]
fn k4_lob_with_a_step_bound() {
    // Fifty steps are enough for the loop check to find a finite
    // transitive countermodel; a bound below the search's needs is not.
    let (code, out, _) = kripke(&["decide", "--logic", "K4", "Box (Box p --> p) --> Box p", "--max-steps", "50"]);
    assert_eq!(code, 1, "{out}");
    let (code, out, _) = kripke(&["decide", "--logic", "K4", "Box (Box p --> p) --> Box p", "--max-steps", "5"]);
    assert_eq!(code, 2);
    assert!(out.contains("Undetermined in K4 after 5 steps"));
}

#[test]
fn json_countermodel_round_trips() {
    let goal = "Box (Box p --> p) --> Box p";
    let (code, out, _) = kripke(&["decide", "--logic", "T", goal, "--format", "json"]);
    assert_eq!(code, 1);
    let OutcomeJson::NonTheorem { logic, world, countermodel, .. } = serde_json::from_str(&out).unwrap() else {
        panic!("{out}");
    };
    assert_eq!(logic, "T");
    let m = KripkeModel::try_from(countermodel).unwrap();
    assert!(m.in_class(Logic::T.frame_class()));
    assert_eq!(holds(&m, &parse(goal).unwrap(), world), Ok(false));
}

#[test]
fn json_proof_round_trips() {
    for (logic, goal) in [("GL", "Box (Box p --> p) --> Box p"), ("K", "Box (p && q) <-> Box p && Box q")] {
        let (code, out, _) = kripke(&["decide", "--logic", logic, goal, "--format", "json"]);
        assert_eq!(code, 0);
        let OutcomeJson::Theorem { proof, .. } = serde_json::from_str(&out).unwrap() else {
            panic!("{out}");
        };
        assert!(proof.nodes.iter().all(|n| n.sequent.is_some()));
        let tree = proof.to_tree().unwrap();
        let l = Logic::from_name(logic).unwrap();
        replay_proof(&tree, l).unwrap();
        let again = serde_json::to_string(&ProofJson::new(&tree, Some(l))).unwrap();
        assert_eq!(serde_json::from_str::<ProofJson>(&again).unwrap(), proof);
    }
}

#[test]
fn formula_from_file() {
    let path = temp_file("four.txt", "Box p --> Box Box p\n");
    let arg = format!("@{}", path.display());
    assert_eq!(kripke(&["decide", "--logic", "K4", &arg]).0, 0);
    assert_eq!(kripke(&["decide", "--logic", "K", &arg]).0, 1);
}

#[test]
fn parse_errors_exit_3() {
    let (code, out, err) = kripke(&["decide", "Box (p -->"]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("cannot parse formula"), "{err}");
    assert_eq!(kripke(&["decide", "--logic", "S4", "p"]).0, 3);
    assert_eq!(kripke(&["oracle", "p", "--format", "dot"]).0, 3);
    assert_eq!(kripke(&[]).0, 3);
}

#[test]
fn oracle_subcommand() {
    assert_eq!(kripke(&["oracle", "--logic", "GL", "Box p --> Box Box p"]).0, 0);
    let (code, out, _) = kripke(&["oracle", "--logic", "K", "Box p --> p", "--format", "json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "NonTheorem");
    let big = "Box (p --> q) --> Box (q --> r) --> Box (p --> r)";
    let (code, _, err) = kripke(&["oracle", big]);
    assert_eq!(code, 3);
    assert!(err.contains("subformulas"), "{err}");
    assert_eq!(kripke(&["oracle", "--logic", "K4", "Box (p <-> Box Box Box p)"]).0, 2);
    assert_eq!(kripke(&["oracle", "--logic", "K4", "Box (p <-> Box Box Box p)", "--max-steps", "100000"]).0, 1);
}

#[test]
fn check_derivation_files() {
    for (name, l, d) in mlk_regression_suite() {
        let input = DerivationInput { hyps: Default::default(), goal: None, derivation: d };
        let text = serde_json::to_string(&DerivationFile::new(&input)).unwrap();
        let path = temp_file(&format!("{}.json", name.replace([' ', ','], "_")), &text);
        let (code, out, _) = kripke(&["check-derivation", "--logic", l.name(), path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {out}");
    }

    let bad = temp_file("bad.json", r#"[{"f":"Box p --> p","by":"KAxiom"}]"#);
    let (code, out, _) = kripke(&["check-derivation", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("step 0"), "{out}");
    let (code, _, _) = kripke(&["check-derivation", "--logic", "T", "--format", "json", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    let t = temp_file("t.json", r#"[{"f":"Box p --> p","by":"SchemaAxiom"}]"#);
    assert_eq!(kripke(&["check-derivation", "--logic", "T", t.to_str().unwrap()]).0, 0);

    let hyp = temp_file(
        "hyp.json",
        r#"{"hyps":["p"],"goal":"q --> p","steps":[
            {"f":"p","by":"Hypothesis"},
            {"f":"p --> q --> p","by":"KAxiom"},
            {"f":"q --> p","by":"MP","args":[1,0]}]}"#,
    );
    assert_eq!(kripke(&["check-derivation", hyp.to_str().unwrap()]).0, 0);
    let malformed = temp_file("malformed.json", "{not json");
    assert_eq!(kripke(&["check-derivation", malformed.to_str().unwrap()]).0, 3);
    assert_eq!(kripke(&["check-derivation", "/nonexistent/derivation.json"]).0, 3);
}

#[test]
fn correspond_subcommand() {
    for name in ["D", "T", "4", "5", "B", "Lob"] {
        let (code, out, _) = kripke(&["correspond", name]);
        assert_eq!(code, 0, "{name}: {out}");
    }
    let (code, out, _) = kripke(&["correspond", "T", "--property", "transitive", "--format", "json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["agree"], false);
    assert!(v["frame"]["worlds"].is_array());
    assert_eq!(kripke(&["correspond", "Box Box p --> Box p", "--property", "reflexive"]).0, 1);
}
