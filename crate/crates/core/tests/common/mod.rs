//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kripke_core::axiomatic::k_schemata;
use kripke_core::{Derivation, Formula, Justification, KripkeModel, Logic};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn p() -> Formula {
    Formula::atom("p")
}

pub fn q() -> Formula {
    Formula::atom("q")
}

/// Every diamond-free formula over `leaves` of size at most `max_size`,
/// grouped by size.
pub fn corpus(leaves: &[Formula], max_size: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    by_size[1] = leaves.to_vec();
    for n in 2..=max_size {
        let mut out = Vec::new();
        for a in &by_size[n - 1] {
            out.push(Formula::not(a.clone()));
            out.push(Formula::boxed(a.clone()));
        }
        for k in 1..n - 1 {
            for a in &by_size[k] {
                for b in &by_size[n - 1 - k] {
                    out.push(Formula::and(a.clone(), b.clone()));
                    out.push(Formula::or(a.clone(), b.clone()));
                    out.push(Formula::imp(a.clone(), b.clone()));
                    out.push(Formula::iff(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.concat()
}

/// A random formula of exactly `size` nodes.
pub fn random_formula(rng: &mut StdRng, atoms: &[&str], size: usize, diamonds: bool) -> Formula {
    if size <= 1 {
        return match rng.random_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(atoms.choose(rng).unwrap()),
        };
    }
    let unary = if diamonds { 3 } else { 2 };
    let pick = if size == 2 { rng.random_range(0..unary) } else { rng.random_range(0..unary + 4) };
    if pick < unary {
        let a = random_formula(rng, atoms, size - 1, diamonds);
        return match pick {
            0 => Formula::not(a),
            1 => Formula::boxed(a),
            _ => Formula::diam(a),
        };
    }
    let left = rng.random_range(1..size - 1);
    let a = random_formula(rng, atoms, left, diamonds);
    let b = random_formula(rng, atoms, size - 1 - left, diamonds);
    match pick - unary {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::imp(a, b),
        _ => Formula::iff(a, b),
    }
}

/// A random model on up to `max_worlds` worlds over `p` and `q`.
pub fn random_model(rng: &mut StdRng, max_worlds: u32) -> KripkeModel {
    let n = rng.random_range(1..=max_worlds);
    let worlds: BTreeSet<u32> = (0..n).collect();
    let density = rng.random_range(0.1..0.7);
    let mut rel = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(density) {
                rel.insert((a, b));
            }
        }
    }
    let mut val = BTreeMap::new();
    for atom in ["p", "q"] {
        let ext: BTreeSet<u32> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        val.insert(atom.to_string(), ext);
    }
    KripkeModel::new(worlds, rel, val).unwrap()
}

/// A model bisimilar to `m`: each world is split into two copies and every
/// edge is kept on a random nonempty set of copy pairs.
pub fn split_copy(rng: &mut StdRng, m: &KripkeModel) -> KripkeModel {
    let copy = |w: u32, c: u32| 2 * w + c;
    let worlds = m.worlds().iter().flat_map(|&w| [copy(w, 0), copy(w, 1)]).collect();
    let mut rel = BTreeSet::new();
    for &(a, b) in m.rel() {
        for c in 0..2 {
            let target = rng.random_range(0..3u32);
            if target != 1 {
                rel.insert((copy(a, c), copy(b, 0)));
            }
            if target != 0 {
                rel.insert((copy(a, c), copy(b, 1)));
            }
        }
    }
    let val = m
        .val()
        .iter()
        .map(|(k, ext)| (k.clone(), ext.iter().flat_map(|&w| [copy(w, 0), copy(w, 1)]).collect()))
        .collect();
    KripkeModel::new(worlds, rel, val).unwrap()
}

fn random_instance(rng: &mut StdRng, schema: &Formula, atoms: &[&str]) -> Formula {
    let map = schema
        .atoms()
        .into_iter()
        .map(|v| {
            let size = rng.random_range(1..=3);
            (v, random_formula(rng, atoms, size, false))
        })
        .collect();
    schema.substitute(&map)
}

/// Index pairs `(i, j)` where step `i` is `A --> B` and step `j` is `A`.
fn mp_pairs(d: &Derivation) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, s) in d.steps.iter().enumerate() {
        if let Formula::Imp(a, _) = &s.formula {
            for (j, t) in d.steps.iter().enumerate() {
                if t.formula == **a {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// A random derivation valid in `l` from the hypotheses `hyps`, with at
/// most `max_steps` top-level steps.
pub fn random_derivation(
    rng: &mut StdRng,
    l: Logic,
    hyps: &[Formula],
    max_steps: usize,
    depth: usize,
) -> Derivation {
    let atoms = ["p", "q", "r"];
    let ks = k_schemata();
    let extra = l.schemata();
    let mut d = Derivation::new();
    let len = rng.random_range(1..=max_steps);
    while d.len() < len {
        match rng.random_range(0..10) {
            0 | 1 if !hyps.is_empty() => {
                d.push(hyps.choose(rng).unwrap().clone(), Justification::Hypothesis);
            }
            2 => {
                let s = ks.choose(rng).unwrap().clone();
                let f = random_instance(rng, &s, &atoms);
                d.push(f, Justification::KAxiom);
            }
            3 if !extra.is_empty() => {
                let s = extra.choose(rng).unwrap().clone();
                let f = random_instance(rng, &s, &atoms);
                d.push(f, Justification::SchemaAxiom);
            }
            4 if depth > 0 => {
                let sub = random_derivation(rng, l, &[], 4, depth - 1);
                let f = Formula::boxed(sub.conclusion().unwrap().clone());
                d.push(f, Justification::RN(sub));
            }
            5 | 6 if !d.is_empty() => {
                // Weakening `A` to `B --> A` through the first K schema.
                let j = rng.random_range(0..d.len());
                let a = d.steps[j].formula.clone();
                let size = rng.random_range(1..=3);
                let b = random_formula(rng, &atoms, size, false);
                let ax = Formula::imp(a.clone(), Formula::imp(b.clone(), a.clone()));
                let i = d.push(ax, Justification::KAxiom);
                if d.len() < len {
                    d.push(Formula::imp(b, a), Justification::MP(i, j));
                }
            }
            _ => {
                let pairs = mp_pairs(&d);
                if let Some(&(i, j)) = pairs.choose(rng) {
                    let Formula::Imp(_, b) = &d.steps[i].formula else { unreachable!() };
                    let b = Formula::clone(b);
                    d.push(b, Justification::MP(i, j));
                }
            }
        }
    }
    d
}
