//! Hand-built derivations of standard lemmas.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{deduction_transform, is_k_axiom, Derivation, Justification, Logic};
use crate::formula::Formula;

/// Forward construction of derivations with discharge of hypotheses.
///
/// The helpers panic on misuse: they are meant for derivations written by
/// hand, which are then run through the checker.
#[derive(Clone, Debug)]
pub struct DerivationBuilder {
    logic: Logic,
    hyps: Vec<Formula>,
    d: Derivation,
}

impl DerivationBuilder {
    pub fn new(logic: Logic, hyps: &[Formula]) -> DerivationBuilder {
        DerivationBuilder {
            logic,
            hyps: hyps.to_vec(),
            d: Derivation::new(),
        }
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.d.steps[i].formula
    }

    pub fn hyp(&mut self, f: &Formula) -> usize {
        assert!(self.hyps.contains(f), "{f} is not a hypothesis");
        self.d.push(f.clone(), Justification::Hypothesis)
    }

    pub fn axiom(&mut self, f: Formula) -> usize {
        assert!(is_k_axiom(&f), "{f} is not a K axiom");
        self.d.push(f, Justification::KAxiom)
    }

    pub fn schema(&mut self, f: Formula) -> usize {
        assert!(self.logic.is_schema_axiom(&f), "{f} is not a {} axiom", self.logic);
        self.d.push(f, Justification::SchemaAxiom)
    }

    pub fn mp(&mut self, major: usize, minor: usize) -> usize {
        let Formula::Imp(a, b) = self.formula(major).clone() else {
            panic!("step {major} is not an implication");
        };
        assert_eq!(*a, *self.formula(minor), "minor premise mismatch");
        self.d.push(Formula::clone(&b), Justification::MP(major, minor))
    }

    pub fn rn(&mut self, sub: Derivation) -> usize {
        let a = sub.conclusion().expect("empty sub-derivation").clone();
        self.d.push(Formula::boxed(a), Justification::RN(sub))
    }

    /// Splices in a hypothesis-free derivation; returns its last step.
    pub fn lemma(&mut self, closed: &Derivation) -> usize {
        let base = self.d.len();
        for step in &closed.steps {
            let by = match &step.by {
                Justification::MP(i, j) => Justification::MP(i + base, j + base),
                Justification::Hypothesis => panic!("lemma uses a hypothesis"),
                other => other.clone(),
            };
            self.d.push(step.formula.clone(), by);
        }
        self.d.len() - 1
    }

    /// `lemma` followed by modus ponens with `minor`.
    pub fn apply(&mut self, closed: &Derivation, minor: usize) -> usize {
        let l = self.lemma(closed);
        self.mp(l, minor)
    }

    /// Discharges hypothesis `b`: the derivation now ends in `b --> A`.
    pub fn discharge(mut self, b: &Formula) -> DerivationBuilder {
        let pos = self.hyps.iter().position(|h| h == b).expect("not a hypothesis");
        self.hyps.remove(pos);
        let h: BTreeSet<Formula> = self.hyps.iter().cloned().collect();
        self.d = deduction_transform(self.logic, &h, b, &self.d).expect("builder derivation checks");
        self
    }

    pub fn last(&self) -> usize {
        self.d.len() - 1
    }

    pub fn finish(self) -> Derivation {
        self.d
    }
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::imp(a.clone(), b.clone())
}

fn not_(a: &Formula) -> Formula {
    imp(a, &Formula::False)
}

/// `(a --> b --> False) --> False`, the K encoding of `a && b`.
fn and_code(a: &Formula, b: &Formula) -> Formula {
    not_(&imp(a, &not_(b)))
}

/// `a --> a`.
pub fn imp_refl(a: &Formula) -> Derivation {
    let mut bld = DerivationBuilder::new(Logic::K, core::slice::from_ref(a));
    bld.hyp(a);
    bld.discharge(a).finish()
}

/// `False --> x`.
pub fn ex_falso(x: &Formula) -> Derivation {
    let bot = Formula::False;
    let mut bld = DerivationBuilder::new(Logic::K, core::slice::from_ref(&bot));
    let h = bld.hyp(&bot);
    let ax = bld.axiom(imp(&bot, &not_(&not_(x))));
    let nn = bld.mp(ax, h);
    let dne = bld.axiom(imp(&not_(&not_(x)), x));
    bld.mp(dne, nn);
    bld.discharge(&bot).finish()
}

/// Appends `a && b --> code(a, b)` steps under hypothesis `a && b`.
fn unfold_and(bld: &mut DerivationBuilder, a: &Formula, b: &Formula) -> usize {
    let ab = Formula::and(a.clone(), b.clone());
    let code = and_code(a, b);
    let def = bld.axiom(Formula::iff(ab.clone(), code.clone()));
    let elim = bld.axiom(imp(&Formula::iff(ab.clone(), code.clone()), &imp(&ab, &code)));
    let fwd = bld.mp(elim, def);
    let h = bld.hyp(&ab);
    bld.mp(fwd, h)
}

/// `a && b --> a`.
pub fn and_elim_left(a: &Formula, b: &Formula) -> Derivation {
    let ab = Formula::and(a.clone(), b.clone());
    let na = not_(a);
    // (a --> False) --> a --> b --> False
    let mut inner = DerivationBuilder::new(Logic::K, &[na.clone(), a.clone()]);
    let h1 = inner.hyp(&na);
    let h2 = inner.hyp(a);
    let bot = inner.mp(h1, h2);
    let ax = inner.axiom(imp(&Formula::False, &not_(b)));
    inner.mp(ax, bot);
    let inner = inner.discharge(a).discharge(&na).finish();

    let mut bld = DerivationBuilder::new(Logic::K, &[ab.clone(), na.clone()]);
    let code = unfold_and(&mut bld, a, b);
    let h = bld.hyp(&na);
    let a_nb = bld.apply(&inner, h);
    bld.mp(code, a_nb);
    let mut bld = bld.discharge(&na);
    let nn = bld.last();
    let dne = bld.axiom(imp(&not_(&na), a));
    bld.mp(dne, nn);
    bld.discharge(&ab).finish()
}

/// `a && b --> b`.
pub fn and_elim_right(a: &Formula, b: &Formula) -> Derivation {
    let ab = Formula::and(a.clone(), b.clone());
    let nb = not_(b);
    let mut bld = DerivationBuilder::new(Logic::K, &[ab.clone(), nb.clone()]);
    let code = unfold_and(&mut bld, a, b);
    let h = bld.hyp(&nb);
    let ax = bld.axiom(imp(&nb, &imp(a, &nb)));
    let a_nb = bld.mp(ax, h);
    bld.mp(code, a_nb);
    let mut bld = bld.discharge(&nb);
    let nn = bld.last();
    let dne = bld.axiom(imp(&not_(&nb), b));
    bld.mp(dne, nn);
    bld.discharge(&ab).finish()
}

/// `a --> b --> a && b`.
pub fn and_intro(a: &Formula, b: &Formula) -> Derivation {
    let ab = Formula::and(a.clone(), b.clone());
    let a_nb = imp(a, &not_(b));
    let code = and_code(a, b);
    let mut bld = DerivationBuilder::new(Logic::K, &[a.clone(), b.clone(), a_nb.clone()]);
    let h = bld.hyp(&a_nb);
    let ha = bld.hyp(a);
    let nb = bld.mp(h, ha);
    let hb = bld.hyp(b);
    bld.mp(nb, hb);
    let mut bld = bld.discharge(&a_nb);
    let c = bld.last();
    let def = bld.axiom(Formula::iff(ab.clone(), code.clone()));
    let back = bld.axiom(imp(&Formula::iff(ab.clone(), code.clone()), &imp(&code, &ab)));
    let back = bld.mp(back, def);
    bld.mp(back, c);
    bld.discharge(b).discharge(a).finish()
}

fn split_imp(d: &Derivation) -> (Formula, Formula) {
    match d.conclusion() {
        Some(Formula::Imp(a, b)) => ((**a).clone(), (**b).clone()),
        _ => panic!("derivation does not end in an implication"),
    }
}

/// From a closed derivation of `a --> b`, one of `Box a --> Box b`.
pub fn imp_box(d: &Derivation) -> Derivation {
    let (a, b) = split_imp(d);
    let mut bld = DerivationBuilder::new(Logic::K, &[]);
    let nec = bld.rn(d.clone());
    let dist = bld.axiom(imp(
        &Formula::boxed(imp(&a, &b)),
        &imp(&Formula::boxed(a), &Formula::boxed(b)),
    ));
    bld.mp(dist, nec);
    bld.finish()
}

/// From closed derivations of `a --> b` and `b --> c`, one of `a --> c`.
pub fn compose(l: Logic, d1: &Derivation, d2: &Derivation) -> Derivation {
    let (a, _) = split_imp(d1);
    let mut bld = DerivationBuilder::new(l, core::slice::from_ref(&a));
    let h = bld.hyp(&a);
    let b = bld.apply(d1, h);
    bld.apply(d2, b);
    bld.discharge(&a).finish()
}

/// `Box (a && b) --> Box a && Box b`.
pub fn box_and_forward(a: &Formula, b: &Formula) -> Derivation {
    let bab = Formula::boxed(Formula::and(a.clone(), b.clone()));
    let (ba, bb) = (Formula::boxed(a.clone()), Formula::boxed(b.clone()));
    let mut bld = DerivationBuilder::new(Logic::K, core::slice::from_ref(&bab));
    let h = bld.hyp(&bab);
    let left = bld.apply(&imp_box(&and_elim_left(a, b)), h);
    let right = bld.apply(&imp_box(&and_elim_right(a, b)), h);
    let partial = bld.apply(&and_intro(&ba, &bb), left);
    bld.mp(partial, right);
    bld.discharge(&bab).finish()
}

/// `Box a && Box b --> Box (a && b)`.
pub fn box_and_backward(a: &Formula, b: &Formula) -> Derivation {
    let ab = Formula::and(a.clone(), b.clone());
    let (ba, bb) = (Formula::boxed(a.clone()), Formula::boxed(b.clone()));
    let both = Formula::and(ba.clone(), bb.clone());
    let mut bld = DerivationBuilder::new(Logic::K, core::slice::from_ref(&both));
    let nec = bld.rn(and_intro(a, b));
    let b_ab = imp(b, &ab);
    let dist1 = bld.axiom(imp(
        &Formula::boxed(imp(a, &b_ab)),
        &imp(&ba, &Formula::boxed(b_ab.clone())),
    ));
    let k1 = bld.mp(dist1, nec);
    let h = bld.hyp(&both);
    let got_a = bld.apply(&and_elim_left(&ba, &bb), h);
    let boxed_b_ab = bld.mp(k1, got_a);
    let dist2 = bld.axiom(imp(
        &Formula::boxed(b_ab.clone()),
        &imp(&bb, &Formula::boxed(ab.clone())),
    ));
    let k2 = bld.mp(dist2, boxed_b_ab);
    let got_b = bld.apply(&and_elim_right(&ba, &bb), h);
    bld.mp(k2, got_b);
    bld.discharge(&both).finish()
}

/// `Box a --> Box Box a` in GL, through `c = Box a && a`.
pub fn gl_four(a: &Formula) -> Derivation {
    let ba = Formula::boxed(a.clone());
    let c = Formula::and(ba.clone(), a.clone());
    let bc = Formula::boxed(c.clone());
    let bba = Formula::boxed(ba.clone());

    // a --> (Box Box a && Box a) --> c
    let pair = Formula::and(bba.clone(), ba.clone());
    let mut s1 = DerivationBuilder::new(Logic::GL, &[a.clone(), pair.clone()]);
    let hp = s1.hyp(&pair);
    let got_ba = s1.apply(&and_elim_right(&bba, &ba), hp);
    let partial = s1.apply(&and_intro(&ba, a), got_ba);
    let ha = s1.hyp(a);
    s1.mp(partial, ha);
    let s1 = s1.discharge(&pair).discharge(a).finish();

    // Box c --> Box Box a && Box a
    let s2 = box_and_forward(&ba, a);

    // a --> Box c --> c
    let mut s3 = DerivationBuilder::new(Logic::GL, &[a.clone(), bc.clone()]);
    let ha = s3.hyp(a);
    let pc = s3.apply(&s1, ha);
    let hbc = s3.hyp(&bc);
    let p = s3.apply(&s2, hbc);
    s3.mp(pc, p);
    let s3 = s3.discharge(&bc).discharge(a).finish();

    // Box a --> Box (Box c --> c)
    let s4 = imp_box(&s3);

    // Box (Box c --> c) --> Box c
    let mut s5 = DerivationBuilder::new(Logic::GL, &[]);
    s5.schema(imp(&Formula::boxed(imp(&bc, &c)), &bc));
    let s5 = s5.finish();

    let s6 = compose(Logic::GL, &s4, &s5);
    let s7 = and_elim_left(&ba, a);
    let s8 = imp_box(&s7);
    compose(Logic::GL, &s6, &s8)
}

/// Named derivations with their logic; each checks with no hypotheses.
pub fn mlk_regression_suite() -> Vec<(String, Logic, Derivation)> {
    let p = Formula::atom("p");
    let q = Formula::atom("q");
    let mut out = Vec::new();
    let mut add = |name: &str, l: Logic, d: Derivation| out.push((String::from(name), l, d));
    add("mlk_imp_box on p,q", Logic::K, imp_box(&and_elim_left(&p, &q)));
    add("box_and forward on p,q", Logic::K, box_and_forward(&p, &q));
    add("box_and backward on p,q", Logic::K, box_and_backward(&p, &q));
    add("gl_schema_4", Logic::GL, gl_four(&p));
    add("imp_refl on p", Logic::K, imp_refl(&p));
    add("ex_falso on q", Logic::K, ex_falso(&q));
    add("and_intro on p,q", Logic::K, and_intro(&p, &q));
    add("and_elim_right on p,q", Logic::K, and_elim_right(&p, &q));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axiomatic::check_derivation;
    use crate::formula::parse;

    #[test]
    fn suite_checks_and_proves_the_expected_goals() {
        let expected = [
            ("mlk_imp_box on p,q", "Box (p && q) --> Box p"),
            ("box_and forward on p,q", "Box (p && q) --> Box p && Box q"),
            ("box_and backward on p,q", "Box p && Box q --> Box (p && q)"),
            ("gl_schema_4", "Box p --> Box Box p"),
            ("imp_refl on p", "p --> p"),
            ("ex_falso on q", "False --> q"),
            ("and_intro on p,q", "p --> q --> p && q"),
            ("and_elim_right on p,q", "p && q --> q"),
        ];
        let suite = mlk_regression_suite();
        assert_eq!(suite.len(), expected.len());
        for ((name, l, d), (want_name, goal)) in suite.iter().zip(expected) {
            assert_eq!(name, want_name);
            let goal = parse(goal).unwrap();
            assert_eq!(d.conclusion(), Some(&goal), "{name}");
            check_derivation(*l, &BTreeSet::new(), d, &goal).unwrap();
        }
    }

    #[test]
    fn gl_four_needs_the_gl_schema() {
        let d = gl_four(&Formula::atom("p"));
        let goal = d.conclusion().unwrap().clone();
        assert!(check_derivation(Logic::K4, &BTreeSet::new(), &d, &goal).is_err());
    }
}
