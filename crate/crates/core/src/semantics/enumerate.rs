//! Exhaustive enumeration of small frames and valuations.
//!
//! Valuations are evaluated 64 at a time: each subformula's truth value at a
//! world is a `u64` whose bit `l` belongs to the valuation with index
//! `chunk * 64 + l`. Bit `a * n + w` of a valuation index says whether atom
//! number `a` (in name order) holds at world `w`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::frames::{FrameClass, FrameProperty, MaskFrame};
use super::{KripkeModel, ModelError};
use crate::formula::Formula;

/// Frames larger than this cannot be enumerated.
pub const MAX_ENUMERATED_WORLDS: usize = 7;

/// A falsifying model and world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub model: KripkeModel,
    pub world: u32,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    False,
    True,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Iff(usize, usize),
    Box(usize),
    Diam(usize),
}

/// A formula flattened into a subformula DAG in evaluation order.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    ops: Vec<Op>,
    pub atoms: Vec<String>,
}

const LANE_BITS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Compiled {
    pub fn new(f: &Formula) -> Compiled {
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let mut c = Compiled { ops: Vec::new(), atoms };
        let mut seen = BTreeMap::new();
        c.push(f, &mut seen);
        c
    }

    fn push(&mut self, f: &Formula, seen: &mut BTreeMap<Formula, usize>) -> usize {
        if let Some(&i) = seen.get(f) {
            return i;
        }
        let op = match f {
            Formula::False => Op::False,
            Formula::True => Op::True,
            Formula::Atom(a) => Op::Atom(self.atoms.binary_search(a).unwrap()),
            Formula::Not(a) => Op::Not(self.push(a, seen)),
            Formula::Box(a) => Op::Box(self.push(a, seen)),
            Formula::Diam(a) => Op::Diam(self.push(a, seen)),
            Formula::And(a, b) => Op::And(self.push(a, seen), self.push(b, seen)),
            Formula::Or(a, b) => Op::Or(self.push(a, seen), self.push(b, seen)),
            Formula::Imp(a, b) => Op::Imp(self.push(a, seen), self.push(b, seen)),
            Formula::Iff(a, b) => Op::Iff(self.push(a, seen), self.push(b, seen)),
        };
        self.ops.push(op);
        seen.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    /// Number of valuation bits on an `n`-world frame.
    pub fn valuation_bits(&self, n: usize) -> usize {
        self.atoms.len() * n
    }

    /// Truth of the root at every world, for the 64 valuations of `chunk`.
    /// `out` receives one word per world.
    pub fn eval(&self, frame: &MaskFrame, chunk: u64, scratch: &mut Vec<u64>, out: &mut [u64]) {
        let n = frame.n;
        scratch.clear();
        scratch.resize(self.ops.len() * n, 0);
        for (k, op) in self.ops.iter().enumerate() {
            for w in 0..n {
                let at = |i: usize| scratch[i * n + w];
                let v = match *op {
                    Op::False => 0,
                    Op::True => !0,
                    Op::Atom(a) => {
                        let j = a * n + w;
                        if j < 6 {
                            LANE_BITS[j]
                        } else if chunk >> (j - 6) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    }
                    Op::Not(a) => !at(a),
                    Op::And(a, b) => at(a) & at(b),
                    Op::Or(a, b) => at(a) | at(b),
                    Op::Imp(a, b) => !at(a) | at(b),
                    Op::Iff(a, b) => !(at(a) ^ at(b)),
                    Op::Box(a) => successors(frame, w).fold(!0, |acc, x| acc & scratch[a * n + x]),
                    Op::Diam(a) => successors(frame, w).fold(0, |acc, x| acc | scratch[a * n + x]),
                };
                scratch[k * n + w] = v;
            }
        }
        let root = self.ops.len() - 1;
        out[..n].copy_from_slice(&scratch[root * n..root * n + n]);
    }

    /// Lanes of the last chunk that correspond to real valuations.
    fn lane_mask(bits: usize) -> u64 {
        if bits >= 6 {
            !0
        } else {
            (1u64 << (1u32 << bits)) - 1
        }
    }

    fn chunks(bits: usize) -> u64 {
        if bits <= 6 {
            1
        } else {
            1u64 << (bits - 6)
        }
    }

    /// The first falsifying (valuation index, world) on `frame`, if any.
    pub fn first_failure(&self, frame: &MaskFrame) -> Option<(u64, usize)> {
        let bits = self.valuation_bits(frame.n);
        assert!(bits < 64, "too many atoms and worlds to enumerate valuations");
        let lanes = Self::lane_mask(bits);
        let mut scratch = Vec::new();
        let mut out = [0u64; 8];
        for chunk in 0..Self::chunks(bits) {
            self.eval(frame, chunk, &mut scratch, &mut out);
            let mut best: Option<(u32, usize)> = None;
            for (w, &v) in out[..frame.n].iter().enumerate() {
                let fail = !v & lanes;
                if fail != 0 {
                    let lane = fail.trailing_zeros();
                    if best.is_none_or(|(l, _)| lane < l) {
                        best = Some((lane, w));
                    }
                }
            }
            if let Some((lane, w)) = best {
                return Some((chunk * 64 + u64::from(lane), w));
            }
        }
        None
    }

    pub fn model(&self, frame: &MaskFrame, valuation: u64) -> Result<KripkeModel, ModelError> {
        let n = frame.n;
        let mut val = BTreeMap::new();
        for (a, name) in self.atoms.iter().enumerate() {
            let ext: BTreeSet<u32> = (0..n)
                .filter(|w| valuation >> (a * n + w) & 1 == 1)
                .map(|w| w as u32)
                .collect();
            val.insert(name.clone(), ext);
        }
        KripkeModel::new((0..n as u32).collect(), frame.edges().collect(), val)
    }
}

fn successors(frame: &MaskFrame, w: usize) -> impl Iterator<Item = usize> {
    let s = frame.succ[w];
    (0..frame.n).filter(move |&j| s >> j & 1 == 1)
}

fn frames_in(n: usize) -> impl Iterator<Item = MaskFrame> {
    (0..1u64 << (n * n)).map(move |rel| MaskFrame::from_rel_mask(n, rel))
}

fn check_bound(max_worlds: usize) {
    assert!(
        (1..=MAX_ENUMERATED_WORLDS).contains(&max_worlds),
        "max_worlds must be between 1 and {MAX_ENUMERATED_WORLDS}"
    );
}

/// Exhaustive validity over the frames of `class` with at most `max_worlds`
/// worlds. Frames are visited by size, then relation bitmask; valuations by
/// index. The first falsifying model and world is returned.
///
/// # Panics
///
/// Panics unless `1 <= max_worlds <= MAX_ENUMERATED_WORLDS`, or when the
/// atoms times worlds exceed 63 valuation bits.
pub fn valid_in_class_bounded(
    f: &Formula,
    class: FrameClass,
    max_worlds: usize,
) -> Result<(), Counterexample> {
    check_bound(max_worlds);
    let c = Compiled::new(f);
    for n in 1..=max_worlds {
        for frame in frames_in(n).filter(|fr| fr.in_class(class)) {
            if let Some((valuation, w)) = c.first_failure(&frame) {
                let model = c.model(&frame, valuation).expect("enumerated model is well formed");
                return Err(Counterexample { model, world: w as u32 });
            }
        }
    }
    Ok(())
}

/// Validity of `f` on a frame: every valuation, every world.
pub fn frame_valid(f: &Formula, worlds: &BTreeSet<u32>, rel: &BTreeSet<(u32, u32)>) -> bool {
    let index: BTreeMap<u32, usize> = worlds.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let n = index.len();
    check_bound(n);
    let mut succ = [0u8; 8];
    for (a, b) in rel {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            succ[i] |= 1 << j;
        }
    }
    Compiled::new(f).first_failure(&MaskFrame { n, succ }).is_none()
}

/// The first frame (by size, then relation bitmask) of at most `max_worlds`
/// worlds on which validity of `schema` and the conjunction of `props`
/// disagree. Returns the frame's world set and relation.
pub fn correspondence_failure(
    schema: &Formula,
    props: &[FrameProperty],
    max_worlds: usize,
) -> Option<(BTreeSet<u32>, BTreeSet<(u32, u32)>)> {
    check_bound(max_worlds);
    let c = Compiled::new(schema);
    for n in 1..=max_worlds {
        for frame in frames_in(n) {
            let valid = c.first_failure(&frame).is_none();
            let has = props.iter().all(|&p| frame.has(p));
            if valid != has {
                return Some(((0..n as u32).collect(), frame.edges().collect()));
            }
        }
    }
    None
}

/// Schema validity coincides with `props` on every frame up to `max_worlds`.
pub fn correspondence_check(schema: &Formula, props: &[FrameProperty], max_worlds: usize) -> bool {
    correspondence_failure(schema, props, max_worlds).is_none()
}

/// The finite-model bound `2^|subformulas|`, capped at four worlds.
pub fn default_max_worlds(f: &Formula) -> usize {
    let subs = f.subformulas().len();
    if subs >= 3 {
        4
    } else {
        1 << subs
    }
}
