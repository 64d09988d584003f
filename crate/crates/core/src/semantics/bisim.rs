use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{holds, KripkeModel, SemanticsError};
use crate::formula::Formula;

fn all_atoms<'a>(m1: &'a KripkeModel, m2: &'a KripkeModel) -> BTreeSet<&'a String> {
    m1.val().keys().chain(m2.val().keys()).collect()
}

/// Checks the atom, forth and back clauses for `z` between `m1` and `m2`.
pub fn is_bisimulation(m1: &KripkeModel, m2: &KripkeModel, z: &BTreeSet<(u32, u32)>) -> bool {
    let atoms = all_atoms(m1, m2);
    z.iter().all(|&(a, b)| {
        m1.worlds().contains(&a)
            && m2.worlds().contains(&b)
            && atoms.iter().all(|p| m1.is_true(p, a) == m2.is_true(p, b))
            && m1
                .successors(a)
                .all(|a2| m2.successors(b).any(|b2| z.contains(&(a2, b2))))
            && m2
                .successors(b)
                .all(|b2| m1.successors(a).any(|a2| z.contains(&(a2, b2))))
    })
}

/// Compares the truth of `f` at two worlds related by the bisimulation `z`.
pub fn bisimilar_agree(
    m1: &KripkeModel,
    w1: u32,
    m2: &KripkeModel,
    w2: u32,
    z: &BTreeSet<(u32, u32)>,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    if !z.contains(&(w1, w2)) {
        return Err(SemanticsError::PreconditionViolated("world pair not in the relation"));
    }
    if !is_bisimulation(m1, m2, z) {
        return Err(SemanticsError::PreconditionViolated("relation is not a bisimulation"));
    }
    Ok(holds(m1, f, w1)? == holds(m2, f, w2)?)
}

/// The largest bisimulation between `m1` and `m2`, by partition refinement
/// on their disjoint union.
pub fn maximal_bisimulation(m1: &KripkeModel, m2: &KripkeModel) -> BTreeSet<(u32, u32)> {
    let atoms = all_atoms(m1, m2);
    // Nodes of the union: (side, world).
    let nodes: Vec<(usize, u32)> = m1
        .worlds()
        .iter()
        .map(|&w| (0, w))
        .chain(m2.worlds().iter().map(|&w| (1, w)))
        .collect();
    let index: BTreeMap<(usize, u32), usize> =
        nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let models = [m1, m2];
    let succ: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&(side, w)| {
            models[side]
                .successors(w)
                .map(|x| index[&(side, x)])
                .collect()
        })
        .collect();

    let renumber = |keys: Vec<Vec<usize>>| -> (Vec<usize>, usize) {
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let blocks = keys
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        (blocks, ids.len())
    };

    let initial = nodes
        .iter()
        .map(|&(side, w)| {
            atoms
                .iter()
                .map(|p| usize::from(models[side].is_true(p, w)))
                .collect()
        })
        .collect();
    let (mut block, mut count) = renumber(initial);
    loop {
        let keys = (0..nodes.len())
            .map(|i| {
                let succ_blocks: BTreeSet<usize> = succ[i].iter().map(|&j| block[j]).collect();
                core::iter::once(block[i]).chain(succ_blocks).collect()
            })
            .collect();
        let (next, next_count) = renumber(keys);
        block = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }

    let mut z = BTreeSet::new();
    for &a in m1.worlds() {
        for &b in m2.worlds() {
            if block[index[&(0, a)]] == block[index[&(1, b)]] {
                z.insert((a, b));
            }
        }
    }
    z
}
