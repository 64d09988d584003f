//! Labelled sequent proof search for K, T, K4 and GL.
//!
//! The calculus is G3K with the principal formula kept in every premise,
//! extended per logic: Refl for T, Trans for K4, and for GL Trans, Irrefl
//! and the Löb variant of R□ that also puts `y : Box A` on the left.
//!
//! Search is root-first from `⇒ 0 : goal`. At each step the first
//! unsaturated rule instance is applied, by priority:
//!
//! 1. non-branching propositional rules,
//! 2. branching propositional rules,
//! 3. L□ on an edge whose target lacks the formula,
//! 4. Refl / Trans,
//! 5. R□ (R□-Löb for GL), lowest label first, then by formula text.
//!
//! A propositional instance is saturated once one of its premises would
//! equal the conclusion. R□ fires once per label and boxed formula. In K4 a
//! label is blocked when an ancestor already covers it (see
//! [`Branch::blocker`]); the step bound is the backstop there. Every
//! countermodel is checked by the semantics module before it is reported.

mod calculus;
mod engine;

pub use calculus::{
    extract_countermodel, proof_sequents, replay_proof, replay_with, Branch, ExtractError,
    LabelledFormula, Principal, ProofNode, ProofTree, RelAtom, ReplayError, Rule, RuleError,
    RuleSet, Sequent,
};

use crate::axiomatic::Logic;
use crate::formula::Formula;
use crate::semantics::KripkeModel;
use engine::{Found, Search};

/// Rule applications allowed per query unless the caller says otherwise.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Theorem(ProofTree),
    /// A model refuting the goal at `world`, and the open branch it came from.
    NonTheorem {
        model: KripkeModel,
        world: u32,
        branch: Branch,
    },
    Undetermined {
        steps: usize,
    },
}

/// The outcome without proof or countermodel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Theorem,
    NonTheorem,
    Undetermined,
}

impl SearchOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            SearchOutcome::Theorem(_) => Verdict::Theorem,
            SearchOutcome::NonTheorem { .. } => Verdict::NonTheorem,
            SearchOutcome::Undetermined { .. } => Verdict::Undetermined,
        }
    }
}

/// Decides `f` in `l` with the given step budget.
pub fn decide(l: Logic, f: &Formula, max_steps: usize) -> SearchOutcome {
    match Search::run(l, &f.without_diamonds(), max_steps, true) {
        Found::Theorem(proof) => SearchOutcome::Theorem(proof.expect("proof is recorded")),
        Found::Open(found) => {
            let (model, world, branch) = found.expect("countermodel is recorded");
            SearchOutcome::NonTheorem { model, world, branch }
        }
        Found::Undetermined(steps) => SearchOutcome::Undetermined { steps },
    }
}

/// Same search as [`decide`] without building proofs.
///
/// Countermodels obtained through K4 blocking are still built and checked;
/// other open branches are reported directly.
pub fn decide_verdict(l: Logic, f: &Formula, max_steps: usize) -> Verdict {
    match Search::run(l, &f.without_diamonds(), max_steps, false) {
        Found::Theorem(_) => Verdict::Theorem,
        Found::Open(_) => Verdict::NonTheorem,
        Found::Undetermined(_) => Verdict::Undetermined,
    }
}
