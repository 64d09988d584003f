//! Finite Kripke models and the forcing relation.

mod bisim;
mod enumerate;
mod frames;

pub use bisim::{bisimilar_agree, is_bisimulation, maximal_bisimulation};
pub use enumerate::{
    correspondence_check, correspondence_failure, default_max_worlds, frame_valid,
    valid_in_class_bounded, Counterexample, MAX_ENUMERATED_WORLDS,
};
pub use frames::{check_property, FrameClass, FrameProperty};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::{is_atom_name, Formula};

/// Violations of the model invariants.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("edge {0} -> {1} leaves the world set")]
    DanglingEdge(u32, u32),
    #[error("atom `{0}` is true at unknown world {1}")]
    DanglingValuation(String, u32),
    #[error("`{0}` is not a valid atom name")]
    BadAtom(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("world {0} is not in the model")]
    UnknownWorld(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

/// A finite model. Atoms missing from the valuation are false everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KripkeModel {
    worlds: BTreeSet<u32>,
    rel: BTreeSet<(u32, u32)>,
    val: BTreeMap<String, BTreeSet<u32>>,
}

impl KripkeModel {
    pub fn new(
        worlds: BTreeSet<u32>,
        rel: BTreeSet<(u32, u32)>,
        mut val: BTreeMap<String, BTreeSet<u32>>,
    ) -> Result<Self, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if let Some(&(a, b)) = rel
            .iter()
            .find(|(a, b)| !worlds.contains(a) || !worlds.contains(b))
        {
            return Err(ModelError::DanglingEdge(a, b));
        }
        for (atom, ext) in &val {
            if !is_atom_name(atom) {
                return Err(ModelError::BadAtom(atom.clone()));
            }
            if let Some(&w) = ext.iter().find(|w| !worlds.contains(w)) {
                return Err(ModelError::DanglingValuation(atom.clone(), w));
            }
        }
        val.retain(|_, ext| !ext.is_empty());
        Ok(KripkeModel { worlds, rel, val })
    }

    pub fn worlds(&self) -> &BTreeSet<u32> {
        &self.worlds
    }

    pub fn rel(&self) -> &BTreeSet<(u32, u32)> {
        &self.rel
    }

    pub fn val(&self) -> &BTreeMap<String, BTreeSet<u32>> {
        &self.val
    }

    pub fn successors(&self, w: u32) -> impl Iterator<Item = u32> + '_ {
        self.rel.range((w, 0)..=(w, u32::MAX)).map(|&(_, x)| x)
    }

    pub fn is_true(&self, atom: &str, w: u32) -> bool {
        self.val.get(atom).is_some_and(|ext| ext.contains(&w))
    }

    /// Atoms true at `w`, in name order.
    pub fn atoms_at(&self, w: u32) -> Vec<&str> {
        self.val
            .iter()
            .filter(|(_, ext)| ext.contains(&w))
            .map(|(a, _)| a.as_str())
            .collect()
    }

    /// The same model with every world renamed by an injective `rename`.
    pub fn relabel(&self, rename: impl Fn(u32) -> u32) -> KripkeModel {
        KripkeModel {
            worlds: self.worlds.iter().map(|&w| rename(w)).collect(),
            rel: self.rel.iter().map(|&(a, b)| (rename(a), rename(b))).collect(),
            val: self
                .val
                .iter()
                .map(|(a, ext)| (a.clone(), ext.iter().map(|&w| rename(w)).collect()))
                .collect(),
        }
    }

    /// True if the frame has every property of `class`.
    pub fn in_class(&self, class: FrameClass) -> bool {
        class.contains(&self.worlds, &self.rel)
    }
}

/// Forcing: does `f` hold at world `w` of `m`?
pub fn holds(m: &KripkeModel, f: &Formula, w: u32) -> Result<bool, SemanticsError> {
    if !m.worlds.contains(&w) {
        return Err(SemanticsError::UnknownWorld(w));
    }
    Ok(force(m, f, w))
}

fn force(m: &KripkeModel, f: &Formula, w: u32) -> bool {
    match f {
        Formula::False => false,
        Formula::True => true,
        Formula::Atom(a) => m.is_true(a, w),
        Formula::Not(a) => !force(m, a, w),
        Formula::And(a, b) => force(m, a, w) && force(m, b, w),
        Formula::Or(a, b) => force(m, a, w) || force(m, b, w),
        Formula::Imp(a, b) => !force(m, a, w) || force(m, b, w),
        Formula::Iff(a, b) => force(m, a, w) == force(m, b, w),
        Formula::Box(a) => m.successors(w).all(|x| force(m, a, x)),
        // Not Box Not a
        Formula::Diam(a) => !m.successors(w).all(|x| !force(m, a, x)),
    }
}

/// `f` holds at every world of `m`.
pub fn valid_in_model(m: &KripkeModel, f: &Formula) -> bool {
    m.worlds.iter().all(|&w| force(m, f, w))
}
