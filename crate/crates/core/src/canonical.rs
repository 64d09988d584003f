//! Maximal consistent sets over the subformulas of a goal and the standard
//! model they form. Consistency is decided by the tableau search, so this
//! module gives a second, independent route to each verdict.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::axiomatic::Logic;
use crate::formula::{conjoin, Formula};
use crate::semantics::{holds, KripkeModel};
use crate::tableau::{decide_verdict, Verdict, DEFAULT_MAX_STEPS};

/// Goals with more subformulas are refused.
pub const MAX_SUBFORMULAS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalError {
    #[error("the search could not decide a consistency query")]
    OracleUndetermined,
    #[error("goal has {0} subformulas, the limit is {MAX_SUBFORMULAS}")]
    SizeLimit(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("truth lemma fails for `{formula}` at world {world}")]
    TruthLemma { world: u32, formula: Formula },
    #[error("standard frame is outside the logic's class")]
    FrameClass,
    #[error("accessibility lemma fails for `{formula}` at world {world}")]
    Accessibility { world: u32, formula: Formula },
}

/// A maximal consistent set: one of `q` / `Not q` for every subformula `q`
/// of the goal, in subformula order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct McsWorld {
    pub formulas: Vec<Formula>,
}

impl McsWorld {
    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }
}

/// `l` does not prove `Not (x1 && ... && xn)`.
pub fn consistent(l: Logic, xs: &[Formula]) -> Result<bool, CanonicalError> {
    consistent_within(l, xs, DEFAULT_MAX_STEPS)
}

/// [`consistent`] with an explicit step budget for the search.
pub fn consistent_within(l: Logic, xs: &[Formula], max_steps: usize) -> Result<bool, CanonicalError> {
    let query = Formula::not(conjoin(xs));
    match decide_verdict(l, &query, max_steps) {
        Verdict::Theorem => Ok(false),
        Verdict::NonTheorem => Ok(true),
        Verdict::Undetermined => Err(CanonicalError::OracleUndetermined),
    }
}

fn order_like(subs: &[Formula], members: &BTreeSet<Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for s in subs {
        for f in [s.clone(), Formula::not(s.clone())] {
            if members.contains(&f) && !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

/// Extends a consistent list of subsentences of `goal` to a maximal one,
/// deciding each subformula in order: `E` if that stays consistent, else
/// `Not E`.
pub fn lindenbaum_extend(l: Logic, goal: &Formula, xs: &[Formula]) -> Result<McsWorld, CanonicalError> {
    let goal = goal.without_diamonds();
    let subs = goal.subformula_list();
    let mut cur: Vec<Formula> = xs.iter().map(Formula::without_diamonds).collect();
    let is_subsentence = |f: &Formula| {
        subs.contains(f) || matches!(f, Formula::Not(a) if subs.contains(a))
    };
    if !cur.iter().all(is_subsentence) {
        return Err(CanonicalError::PreconditionViolated("not a subsentence of the goal"));
    }
    if !consistent(l, &cur)? {
        return Err(CanonicalError::PreconditionViolated("inconsistent input"));
    }
    for e in &subs {
        let neg = Formula::not(e.clone());
        if cur.contains(e) || cur.contains(&neg) {
            continue;
        }
        cur.push(e.clone());
        if !consistent(l, &cur)? {
            cur.pop();
            cur.push(neg);
        }
    }
    Ok(McsWorld {
        formulas: order_like(&subs, &cur.into_iter().collect()),
    })
}

/// The standard model of `l` for a goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardModel {
    /// Diamond-free goal the model was built for.
    pub goal: Formula,
    pub subformulas: Vec<Formula>,
    /// World `i` of `model` is `worlds[i]`.
    pub worlds: Vec<McsWorld>,
    pub model: KripkeModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardOutcome {
    /// No maximal consistent set contains the negated goal.
    TheoremSignal,
    Model(StandardModel),
}

/// Sign vectors over `subs` that respect the connectives; atoms and boxes
/// are the only free positions. Vectors are produced in counting order over
/// the free positions, `true` being bit one.
fn coherent_vectors(subs: &[Formula]) -> Vec<Vec<bool>> {
    let index: BTreeMap<&Formula, usize> = subs.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let free: Vec<usize> = (0..subs.len())
        .filter(|&i| matches!(subs[i], Formula::Atom(_) | Formula::Box(_)))
        .collect();
    let mut out = Vec::new();
    for mask in 0..1u32 << free.len() {
        let mut v = alloc::vec![false; subs.len()];
        let mut next_free = 0;
        for (i, f) in subs.iter().enumerate() {
            let at = |g: &Formula| v[index[g]];
            v[i] = match f {
                Formula::False => false,
                Formula::True => true,
                Formula::Atom(_) | Formula::Box(_) => {
                    next_free += 1;
                    mask >> (next_free - 1) & 1 == 1
                }
                Formula::Not(a) => !at(a),
                Formula::And(a, b) => at(a) && at(b),
                Formula::Or(a, b) => at(a) || at(b),
                Formula::Imp(a, b) => !at(a) || at(b),
                Formula::Iff(a, b) => at(a) == at(b),
                Formula::Diam(_) => unreachable!("goal is diamond-free"),
            };
        }
        out.push(v);
    }
    out
}

fn standard_rel(l: Logic, subs: &[Formula], w: &[bool], x: &[bool]) -> bool {
    let mut fresh_box = false;
    for (i, f) in subs.iter().enumerate() {
        let Formula::Box(b) = f else { continue };
        let bi = subs.iter().position(|g| g == &**b).expect("subformulas are closed");
        if w[i] && !x[bi] {
            return false;
        }
        if matches!(l, Logic::K4 | Logic::GL) && w[i] && !x[i] {
            return false;
        }
        fresh_box |= x[i] && !w[i];
    }
    l != Logic::GL || fresh_box
}

/// Builds the standard model for `goal`, or signals that the goal is a
/// theorem. The frame class, truth lemma and accessibility lemma are
/// checked on every model built.
pub fn standard_model(l: Logic, goal: &Formula) -> Result<StandardOutcome, CanonicalError> {
    standard_model_within(l, goal, DEFAULT_MAX_STEPS)
}

/// [`standard_model`] with an explicit step budget per consistency query.
pub fn standard_model_within(
    l: Logic,
    goal: &Formula,
    max_steps: usize,
) -> Result<StandardOutcome, CanonicalError> {
    let goal = goal.without_diamonds();
    let subs = goal.subformula_list();
    if subs.len() > MAX_SUBFORMULAS {
        return Err(CanonicalError::SizeLimit(subs.len()));
    }
    let mut vectors = Vec::new();
    for v in coherent_vectors(&subs) {
        let members: Vec<Formula> = subs
            .iter()
            .zip(&v)
            .map(|(f, &t)| if t { f.clone() } else { Formula::not(f.clone()) })
            .collect();
        if consistent_within(l, &members, max_steps)? {
            vectors.push((v, members));
        }
    }
    let goal_at = subs.iter().position(|f| f == &goal).expect("goal is a subformula");
    if vectors.iter().all(|(v, _)| v[goal_at]) {
        return Ok(StandardOutcome::TheoremSignal);
    }

    let n = vectors.len() as u32;
    let mut rel = BTreeSet::new();
    for (i, (w, _)) in vectors.iter().enumerate() {
        for (j, (x, _)) in vectors.iter().enumerate() {
            if standard_rel(l, &subs, w, x) {
                rel.insert((i as u32, j as u32));
            }
        }
    }
    let mut val: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
    for (k, f) in subs.iter().enumerate() {
        if let Formula::Atom(a) = f {
            let ext = (0..n).filter(|&i| vectors[i as usize].0[k]).collect();
            val.insert(a.clone(), ext);
        }
    }
    let model = KripkeModel::new((0..n).collect(), rel, val)
        .map_err(|_| CanonicalError::PreconditionViolated("standard model is malformed"))?;
    if !model.in_class(l.frame_class()) {
        return Err(CanonicalError::FrameClass);
    }
    for (i, (v, _)) in vectors.iter().enumerate() {
        let world = i as u32;
        for (k, f) in subs.iter().enumerate() {
            if holds(&model, f, world) != Ok(v[k]) {
                return Err(CanonicalError::TruthLemma { world, formula: f.clone() });
            }
            if let Formula::Box(b) = f {
                let bk = subs.iter().position(|g| g == &**b).unwrap();
                let all_succ = model.successors(world).all(|x| vectors[x as usize].0[bk]);
                if all_succ != v[k] {
                    return Err(CanonicalError::Accessibility { world, formula: f.clone() });
                }
            }
        }
    }
    Ok(StandardOutcome::Model(StandardModel {
        goal,
        subformulas: subs,
        worlds: vectors.into_iter().map(|(_, formulas)| McsWorld { formulas }).collect(),
        model,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Theorem,
    /// `world` contains the negated goal and refutes it.
    NonTheorem { model: KripkeModel, world: u32 },
}

impl OracleVerdict {
    pub fn is_theorem(&self) -> bool {
        matches!(self, OracleVerdict::Theorem)
    }
}

/// Theoremhood through the standard model.
pub fn oracle_verdict(l: Logic, f: &Formula) -> Result<OracleVerdict, CanonicalError> {
    oracle_verdict_within(l, f, DEFAULT_MAX_STEPS)
}

/// [`oracle_verdict`] with an explicit step budget per consistency query.
pub fn oracle_verdict_within(l: Logic, f: &Formula, max_steps: usize) -> Result<OracleVerdict, CanonicalError> {
    match standard_model_within(l, f, max_steps)? {
        StandardOutcome::TheoremSignal => Ok(OracleVerdict::Theorem),
        StandardOutcome::Model(sm) => {
            let neg = Formula::not(sm.goal.clone());
            let world = sm
                .worlds
                .iter()
                .position(|w| w.contains(&neg))
                .expect("some world refutes the goal") as u32;
            debug_assert_eq!(holds(&sm.model, &sm.goal, world), Ok(false));
            Ok(OracleVerdict::NonTheorem { model: sm.model, world })
        }
    }
}
