//! Hilbert-style derivations over K extended by a logic's own schemata.

mod lemmas;

pub use lemmas::{
    and_elim_left, and_elim_right, and_intro, box_and_backward, box_and_forward, compose, ex_falso,
    gl_four, imp_box, imp_refl, mlk_regression_suite, DerivationBuilder,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{parse, Formula};
use crate::semantics::FrameClass;

/// The normal modal logics handled by the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Logic {
    K,
    T,
    K4,
    GL,
}

/// The propositional basis plus distribution. Atoms are metavariables.
const K_SCHEMATA: [&str; 11] = [
    "p --> (q --> p)",
    "(p --> q --> r) --> (p --> q) --> (p --> r)",
    "((p --> False) --> False) --> p",
    "(p <-> q) --> p --> q",
    "(p <-> q) --> q --> p",
    "(p --> q) --> (q --> p) --> (p <-> q)",
    "True <-> False --> False",
    "Not p <-> p --> False",
    "p && q <-> (p --> q --> False) --> False",
    "p || q <-> Not(Not p && Not q)",
    "Box (p --> q) --> Box p --> Box q",
];

impl Logic {
    pub const ALL: [Logic; 4] = [Logic::K, Logic::T, Logic::K4, Logic::GL];

    pub fn name(self) -> &'static str {
        match self {
            Logic::K => "K",
            Logic::T => "T",
            Logic::K4 => "K4",
            Logic::GL => "GL",
        }
    }

    pub fn from_name(name: &str) -> Option<Logic> {
        Logic::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(name))
    }

    /// The logic's own axiom schemata, on top of K.
    pub fn schemata(self) -> Vec<Formula> {
        let text: &[&str] = match self {
            Logic::K => &[],
            Logic::T => &["Box p --> p"],
            Logic::K4 => &["Box p --> Box Box p"],
            Logic::GL => &["Box (Box p --> p) --> Box p"],
        };
        text.iter().map(|s| parse(s).expect("schema text parses")).collect()
    }

    pub fn is_schema_axiom(self, f: &Formula) -> bool {
        self.schemata().iter().any(|s| instance_of(s, f))
    }

    /// The finite frames the logic is sound and complete for.
    pub fn frame_class(self) -> FrameClass {
        match self {
            Logic::K => FrameClass::AllFinite,
            Logic::T => FrameClass::ReflexiveFinite,
            Logic::K4 => FrameClass::TransitiveFinite,
            Logic::GL => FrameClass::IrreflexiveTransitiveFinite,
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The K schemata as formulas over the metavariables `p`, `q`, `r`.
pub fn k_schemata() -> Vec<Formula> {
    K_SCHEMATA
        .iter()
        .map(|s| parse(s).expect("schema text parses"))
        .collect()
}

/// Is `f` obtained from `schema` by uniformly replacing its atoms?
pub fn instance_of(schema: &Formula, f: &Formula) -> bool {
    matches(schema, f, &mut BTreeMap::new())
}

fn matches<'a>(pat: &'a Formula, f: &Formula, binds: &mut BTreeMap<&'a str, Formula>) -> bool {
    match (pat, f) {
        (Formula::Atom(v), _) => match binds.get(v.as_str()) {
            Some(bound) => bound == f,
            None => {
                binds.insert(v, f.clone());
                true
            }
        },
        (Formula::False, Formula::False) | (Formula::True, Formula::True) => true,
        (Formula::Not(a), Formula::Not(x))
        | (Formula::Box(a), Formula::Box(x))
        | (Formula::Diam(a), Formula::Diam(x)) => matches(a, x, binds),
        (Formula::And(a, b), Formula::And(x, y))
        | (Formula::Or(a, b), Formula::Or(x, y))
        | (Formula::Imp(a, b), Formula::Imp(x, y))
        | (Formula::Iff(a, b), Formula::Iff(x, y)) => matches(a, x, binds) && matches(b, y, binds),
        _ => false,
    }
}

/// Instance of one of the eleven K schemata.
pub fn is_k_axiom(f: &Formula) -> bool {
    k_schemata().iter().any(|s| instance_of(s, f))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    KAxiom,
    SchemaAxiom,
    Hypothesis,
    /// `MP(i, j)`: step `i` is `A --> B`, step `j` is `A`.
    MP(usize, usize),
    /// Necessitation of the conclusion of a hypothesis-free derivation.
    RN(Derivation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn new() -> Derivation {
        Derivation::default()
    }

    /// Appends a step and returns its index.
    pub fn push(&mut self, formula: Formula, by: Justification) -> usize {
        self.steps.push(Step { formula, by });
        self.steps.len() - 1
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps counted through RN sub-derivations.
    pub fn total_steps(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.by {
                Justification::RN(sub) => 1 + sub.total_steps(),
                _ => 1,
            })
            .sum()
    }

    /// Uniform substitution applied to every formula, sub-derivations included.
    pub fn substitute(&self, map: &BTreeMap<String, Formula>) -> Derivation {
        Derivation {
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    formula: s.formula.substitute(map),
                    by: match &s.by {
                        Justification::RN(sub) => Justification::RN(sub.substitute(map)),
                        other => other.clone(),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationErrorKind {
    Empty,
    NotAKAxiom,
    NotASchemaAxiom,
    NotAHypothesis,
    ForwardReference,
    NotAnImplication,
    MinorMismatch,
    NotABox,
    GoalMismatch,
    PreconditionViolated,
}

/// The first failing step, as a path of indices through RN sub-derivations.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}: {kind:?}", path_text(.path))]
pub struct DerivationError {
    pub path: Vec<usize>,
    pub kind: DerivationErrorKind,
}

fn path_text(path: &[usize]) -> String {
    if path.is_empty() {
        return String::from("derivation");
    }
    let parts: Vec<String> = path.iter().map(|i| alloc::format!("{i}")).collect();
    alloc::format!("step {}", parts.join("."))
}

fn fail(path: &[usize], kind: DerivationErrorKind) -> DerivationError {
    DerivationError { path: path.to_vec(), kind }
}

/// Checks every step of `d` under hypotheses `h` and that it ends in `goal`.
pub fn check_derivation(
    l: Logic,
    h: &BTreeSet<Formula>,
    d: &Derivation,
    goal: &Formula,
) -> Result<(), DerivationError> {
    let mut path = Vec::new();
    let ax = Axioms { k: k_schemata(), extra: l.schemata() };
    check_steps(&ax, h, d, goal, &mut path)
}

/// Schemata parsed once per check.
struct Axioms {
    k: Vec<Formula>,
    extra: Vec<Formula>,
}

fn check_steps(
    ax: &Axioms,
    h: &BTreeSet<Formula>,
    d: &Derivation,
    goal: &Formula,
    path: &mut Vec<usize>,
) -> Result<(), DerivationError> {
    use DerivationErrorKind as E;
    let Some(last) = d.conclusion() else {
        return Err(fail(path, E::Empty));
    };
    for (k, step) in d.steps.iter().enumerate() {
        path.push(k);
        let f = &step.formula;
        match &step.by {
            Justification::KAxiom if !ax.k.iter().any(|s| instance_of(s, f)) => {
                return Err(fail(path, E::NotAKAxiom))
            }
            Justification::SchemaAxiom if !ax.extra.iter().any(|s| instance_of(s, f)) => {
                return Err(fail(path, E::NotASchemaAxiom))
            }
            Justification::Hypothesis if !h.contains(f) => {
                return Err(fail(path, E::NotAHypothesis))
            }
            Justification::MP(i, j) => {
                if *i >= k || *j >= k {
                    return Err(fail(path, E::ForwardReference));
                }
                let Formula::Imp(a, b) = &d.steps[*i].formula else {
                    return Err(fail(path, E::NotAnImplication));
                };
                if **a != d.steps[*j].formula || **b != *f {
                    return Err(fail(path, E::MinorMismatch));
                }
            }
            Justification::RN(sub) => {
                let Formula::Box(a) = f else {
                    return Err(fail(path, E::NotABox));
                };
                check_steps(ax, &BTreeSet::new(), sub, a, path)?;
            }
            _ => {}
        }
        path.pop();
    }
    if last != goal {
        return Err(fail(path, E::GoalMismatch));
    }
    Ok(())
}

/// Appends a derivation of `b --> b` and returns the index of its last step.
fn push_self_implication(out: &mut Derivation, b: &Formula) -> usize {
    let bb = Formula::imp(b.clone(), b.clone());
    let b_bb = Formula::imp(b.clone(), bb.clone());
    let b_bb_b = Formula::imp(b.clone(), Formula::imp(bb.clone(), b.clone()));
    let s0 = out.push(
        Formula::imp(b_bb_b.clone(), Formula::imp(b_bb.clone(), bb.clone())),
        Justification::KAxiom,
    );
    let s1 = out.push(b_bb_b, Justification::KAxiom);
    let s2 = out.push(Formula::imp(b_bb.clone(), bb.clone()), Justification::MP(s0, s1));
    let s3 = out.push(b_bb, Justification::KAxiom);
    out.push(bb, Justification::MP(s2, s3))
}

/// Appends `c`, the axiom `c --> b --> c` and `b --> c`.
fn push_weakened(out: &mut Derivation, b: &Formula, c: &Formula, by: Justification) -> usize {
    let s = out.push(c.clone(), by);
    let ax = out.push(
        Formula::imp(c.clone(), Formula::imp(b.clone(), c.clone())),
        Justification::KAxiom,
    );
    out.push(Formula::imp(b.clone(), c.clone()), Justification::MP(ax, s))
}

/// Turns a derivation of `A` from `h ∪ {b}` into one of `b --> A` from `h`.
pub fn deduction_transform(
    l: Logic,
    h: &BTreeSet<Formula>,
    b: &Formula,
    d: &Derivation,
) -> Result<Derivation, DerivationError> {
    let goal = d
        .conclusion()
        .ok_or_else(|| fail(&[], DerivationErrorKind::Empty))?
        .clone();
    let mut hb = h.clone();
    hb.insert(b.clone());
    check_derivation(l, &hb, d, &goal)
        .map_err(|_| fail(&[], DerivationErrorKind::PreconditionViolated))?;

    let mut out = Derivation::new();
    if h.contains(b) {
        out.steps.extend(d.steps.iter().cloned());
        let last = out.len() - 1;
        let by = Justification::MP(last + 1, last);
        out.push(Formula::imp(goal.clone(), Formula::imp(b.clone(), goal.clone())), Justification::KAxiom);
        out.push(Formula::imp(b.clone(), goal), by);
        return Ok(out);
    }

    // at[k] is the index in `out` of `b --> C_k`.
    let mut at = Vec::with_capacity(d.len());
    for step in &d.steps {
        let c = &step.formula;
        let idx = if c == b {
            push_self_implication(&mut out, b)
        } else {
            match &step.by {
                Justification::MP(i, j) => {
                    let minor = &d.steps[*j].formula;
                    let b_major = Formula::imp(b.clone(), Formula::imp(minor.clone(), c.clone()));
                    let b_minor = Formula::imp(b.clone(), minor.clone());
                    let b_c = Formula::imp(b.clone(), c.clone());
                    let ax = out.push(
                        Formula::imp(b_major, Formula::imp(b_minor.clone(), b_c.clone())),
                        Justification::KAxiom,
                    );
                    let s = out.push(Formula::imp(b_minor, b_c.clone()), Justification::MP(ax, at[*i]));
                    out.push(b_c, Justification::MP(s, at[*j]))
                }
                by => push_weakened(&mut out, b, c, by.clone()),
            }
        };
        at.push(idx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<Formula> {
        items.iter().map(|s| f(s)).collect()
    }

    #[test]
    fn k_axiom_examples() {
        assert!(is_k_axiom(&f("(q && r) --> (Box s --> (q && r))")));
        assert!(is_k_axiom(&f("Box (p --> q) --> Box p --> Box q")));
        assert!(!is_k_axiom(&f("Box p --> p")));
        assert!(is_k_axiom(&f("True <-> False --> False")));
        assert!(!is_k_axiom(&f("True <-> True --> False")));
        // Metavariables bind consistently.
        assert!(!is_k_axiom(&f("p --> (q --> r)")));
        assert!(is_k_axiom(&f("Not Box a <-> Box a --> False")));
    }

    #[test]
    fn every_schema_is_its_own_instance() {
        for s in k_schemata() {
            assert!(is_k_axiom(&s), "{s}");
        }
        for l in Logic::ALL {
            for s in l.schemata() {
                assert!(l.is_schema_axiom(&s));
            }
        }
    }

    #[test]
    fn logic_recognizers() {
        assert!(!Logic::K.is_schema_axiom(&f("Box p --> p")));
        assert!(Logic::T.is_schema_axiom(&f("Box (a && b) --> a && b")));
        assert!(!Logic::T.is_schema_axiom(&f("Box a --> b")));
        assert!(Logic::K4.is_schema_axiom(&f("Box Box q --> Box Box Box q")));
        assert!(Logic::GL.is_schema_axiom(&f("Box (Box Not p --> Not p) --> Box Not p")));
        assert!(!Logic::GL.is_schema_axiom(&f("Box (Box p --> q) --> Box p")));
        assert_eq!(Logic::from_name("gl"), Some(Logic::GL));
        assert_eq!(Logic::from_name("S4"), None);
    }

    #[test]
    fn check_examples() {
        let mut d = Derivation::new();
        d.push(f("p"), Justification::Hypothesis);
        assert!(check_derivation(Logic::K, &set(&["p"]), &d, &f("p")).is_ok());
        assert_eq!(
            check_derivation(Logic::K, &set(&[]), &d, &f("p")).unwrap_err().kind,
            DerivationErrorKind::NotAHypothesis
        );

        let mut sub = Derivation::new();
        sub.push(f("p --> (q --> p)"), Justification::KAxiom);
        let mut d = Derivation::new();
        d.push(f("p --> (q --> p)"), Justification::KAxiom);
        d.push(f("Box (p --> (q --> p))"), Justification::RN(sub));
        assert!(check_derivation(Logic::K, &set(&[]), &d, &f("Box (p --> (q --> p))")).is_ok());

        let mut d = Derivation::new();
        d.push(f("p"), Justification::Hypothesis);
        d.push(f("q"), Justification::Hypothesis);
        d.push(f("q"), Justification::MP(0, 1));
        let err = check_derivation(Logic::K, &set(&["p", "q"]), &d, &f("q")).unwrap_err();
        assert_eq!(err.path, [2]);
        assert_eq!(err.kind, DerivationErrorKind::NotAnImplication);
    }

    #[test]
    fn rn_forbids_hypotheses() {
        let mut sub = Derivation::new();
        sub.push(f("p"), Justification::Hypothesis);
        let mut d = Derivation::new();
        d.push(f("Box p"), Justification::RN(sub));
        let err = check_derivation(Logic::K, &set(&["p"]), &d, &f("Box p")).unwrap_err();
        assert_eq!(err.path, [0, 0]);
        assert_eq!(err.to_string(), "step 0.0: NotAHypothesis");
    }

    #[test]
    fn deduction_of_the_hypothesis_itself() {
        let mut d = Derivation::new();
        d.push(f("p"), Justification::Hypothesis);
        let out = deduction_transform(Logic::K, &set(&[]), &f("p"), &d).unwrap();
        assert!(check_derivation(Logic::K, &set(&[]), &out, &f("p --> p")).is_ok());
        assert_eq!(out.len(), 5);
    }

    #[test]
    fn deduction_when_already_a_hypothesis() {
        let mut d = Derivation::new();
        d.push(f("q"), Justification::Hypothesis);
        let h = set(&["q"]);
        let out = deduction_transform(Logic::K, &h, &f("q"), &d).unwrap();
        assert!(check_derivation(Logic::K, &h, &out, &f("q --> q")).is_ok());
        assert_eq!(out.steps[1].formula, f("q --> (q --> q)"));
    }

    #[test]
    fn deduction_keeps_rn_untouched() {
        let mut sub = Derivation::new();
        sub.push(f("a --> (a --> a)"), Justification::KAxiom);
        let mut d = Derivation::new();
        d.push(f("Box (a --> (a --> a))"), Justification::RN(sub.clone()));
        let out = deduction_transform(Logic::K, &set(&[]), &f("b"), &d).unwrap();
        assert_eq!(out.steps[0].by, Justification::RN(sub));
        assert!(check_derivation(Logic::K, &set(&[]), &out, &f("b --> Box (a --> (a --> a))")).is_ok());
    }

    #[test]
    fn deduction_through_modus_ponens() {
        let mut d = Derivation::new();
        d.push(f("p --> q"), Justification::Hypothesis);
        d.push(f("p"), Justification::Hypothesis);
        d.push(f("q"), Justification::MP(0, 1));
        let h = set(&["p --> q"]);
        let out = deduction_transform(Logic::K, &h, &f("p"), &d).unwrap();
        assert!(check_derivation(Logic::K, &h, &out, &f("p --> q")).is_ok());
        let bad = deduction_transform(Logic::K, &set(&[]), &f("p"), &d).unwrap_err();
        assert_eq!(bad.kind, DerivationErrorKind::PreconditionViolated);
    }

    #[test]
    fn substitution_preserves_checking() {
        let mut sub = Derivation::new();
        sub.push(f("Box p --> p"), Justification::SchemaAxiom);
        let mut d = Derivation::new();
        d.push(f("Box (Box p --> p)"), Justification::RN(sub));
        let mut map = BTreeMap::new();
        map.insert(String::from("p"), f("q && Box r"));
        let s = d.substitute(&map);
        let goal = s.conclusion().unwrap().clone();
        assert_eq!(goal, f("Box (Box (q && Box r) --> q && Box r)"));
        assert!(check_derivation(Logic::T, &set(&[]), &s, &goal).is_ok());
    }
}
