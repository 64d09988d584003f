use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

/// First-order properties of an accessibility relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameProperty {
    Serial,
    Reflexive,
    Irreflexive,
    Symmetric,
    Transitive,
    Euclidean,
    /// No infinite ascending chains. On a finite frame: no cycles.
    ConverseWellFounded,
}

impl FrameProperty {
    pub const ALL: [FrameProperty; 7] = [
        FrameProperty::Serial,
        FrameProperty::Reflexive,
        FrameProperty::Irreflexive,
        FrameProperty::Symmetric,
        FrameProperty::Transitive,
        FrameProperty::Euclidean,
        FrameProperty::ConverseWellFounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameProperty::Serial => "serial",
            FrameProperty::Reflexive => "reflexive",
            FrameProperty::Irreflexive => "irreflexive",
            FrameProperty::Symmetric => "symmetric",
            FrameProperty::Transitive => "transitive",
            FrameProperty::Euclidean => "euclidean",
            FrameProperty::ConverseWellFounded => "converse-well-founded",
        }
    }

    pub fn from_name(name: &str) -> Option<FrameProperty> {
        FrameProperty::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// Classes of finite frames, each the conjunction of some properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameClass {
    AllFinite,
    ReflexiveFinite,
    TransitiveFinite,
    IrreflexiveTransitiveFinite,
    SerialFinite,
    SymmetricReflexiveFinite,
    EuclideanReflexiveFinite,
}

impl FrameClass {
    pub fn properties(self) -> &'static [FrameProperty] {
        use FrameProperty as P;
        match self {
            FrameClass::AllFinite => &[],
            FrameClass::ReflexiveFinite => &[P::Reflexive],
            FrameClass::TransitiveFinite => &[P::Transitive],
            FrameClass::IrreflexiveTransitiveFinite => &[P::Irreflexive, P::Transitive],
            FrameClass::SerialFinite => &[P::Serial],
            FrameClass::SymmetricReflexiveFinite => &[P::Symmetric, P::Reflexive],
            FrameClass::EuclideanReflexiveFinite => &[P::Euclidean, P::Reflexive],
        }
    }

    pub fn contains(self, worlds: &BTreeSet<u32>, rel: &BTreeSet<(u32, u32)>) -> bool {
        self.properties()
            .iter()
            .all(|&p| check_property(worlds, rel, p))
    }
}

/// Decides `prop` on a finite frame. Edges outside `worlds` are ignored.
pub fn check_property(
    worlds: &BTreeSet<u32>,
    rel: &BTreeSet<(u32, u32)>,
    prop: FrameProperty,
) -> bool {
    let edge = |a: u32, b: u32| rel.contains(&(a, b));
    let mut succ: BTreeMap<u32, Vec<u32>> = worlds.iter().map(|&w| (w, Vec::new())).collect();
    for &(a, b) in rel {
        if worlds.contains(&a) && worlds.contains(&b) {
            succ.get_mut(&a).unwrap().push(b);
        }
    }
    match prop {
        FrameProperty::Serial => succ.values().all(|s| !s.is_empty()),
        FrameProperty::Reflexive => worlds.iter().all(|&w| edge(w, w)),
        FrameProperty::Irreflexive => worlds.iter().all(|&w| !edge(w, w)),
        FrameProperty::Symmetric => succ
            .iter()
            .all(|(&a, s)| s.iter().all(|&b| edge(b, a))),
        FrameProperty::Transitive => succ
            .iter()
            .all(|(&a, s)| s.iter().all(|b| succ[b].iter().all(|&c| edge(a, c)))),
        FrameProperty::Euclidean => succ
            .values()
            .all(|s| s.iter().all(|&b| s.iter().all(|&c| edge(b, c)))),
        FrameProperty::ConverseWellFounded => acyclic(&succ),
    }
}

/// Depth-first cycle detection with an explicit stack.
fn acyclic(succ: &BTreeMap<u32, Vec<u32>>) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark: BTreeMap<u32, Mark> = succ.keys().map(|&w| (w, Mark::New)).collect();
    for &start in succ.keys() {
        if mark[&start] != Mark::New {
            continue;
        }
        let mut stack = alloc::vec![(start, 0usize)];
        mark.insert(start, Mark::Active);
        while let Some(&mut (w, ref mut next)) = stack.last_mut() {
            if let Some(&x) = succ[&w].get(*next) {
                *next += 1;
                match mark[&x] {
                    Mark::Active => return false,
                    Mark::New => {
                        mark.insert(x, Mark::Active);
                        stack.push((x, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark.insert(w, Mark::Done);
                stack.pop();
            }
        }
    }
    true
}

/// A frame on worlds `0..n` (n ≤ 8) stored as successor bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct MaskFrame {
    pub n: usize,
    pub succ: [u8; 8],
}

impl MaskFrame {
    /// Bit `i * n + j` of `rel` encodes the edge `i -> j`.
    pub fn from_rel_mask(n: usize, rel: u64) -> MaskFrame {
        let mut succ = [0u8; 8];
        let row = (1u64 << n) - 1;
        for (i, s) in succ.iter_mut().enumerate().take(n) {
            *s = ((rel >> (i * n)) & row) as u8;
        }
        MaskFrame { n, succ }
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n)
                .filter(move |&j| self.succ[i] >> j & 1 == 1)
                .map(move |j| (i as u32, j as u32))
        })
    }

    fn all(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    pub fn has(&self, prop: FrameProperty) -> bool {
        let ws = 0..self.n;
        let s = &self.succ[..self.n];
        let bits = |m: u8| (0..self.n).filter(move |&j| m >> j & 1 == 1);
        match prop {
            FrameProperty::Serial => s.iter().all(|&m| m != 0),
            FrameProperty::Reflexive => ws.into_iter().all(|i| s[i] >> i & 1 == 1),
            FrameProperty::Irreflexive => ws.into_iter().all(|i| s[i] >> i & 1 == 0),
            FrameProperty::Symmetric => {
                ws.into_iter().all(|i| bits(s[i]).all(|j| s[j] >> i & 1 == 1))
            }
            FrameProperty::Transitive => {
                ws.into_iter().all(|i| bits(s[i]).all(|j| s[j] & !s[i] == 0))
            }
            FrameProperty::Euclidean => {
                ws.into_iter().all(|i| bits(s[i]).all(|j| s[i] & !s[j] == 0))
            }
            FrameProperty::ConverseWellFounded => {
                // Peel off worlds with no successor among the remaining ones.
                let mut left = self.all();
                loop {
                    let sinks = bits(left).filter(|&i| s[i] & left == 0).fold(0u8, |m, i| m | 1 << i);
                    if sinks == 0 {
                        return left == 0;
                    }
                    left &= !sinks;
                }
            }
        }
    }

    pub fn in_class(&self, class: FrameClass) -> bool {
        class.properties().iter().all(|&p| self.has(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(n: u32, edges: &[(u32, u32)]) -> (BTreeSet<u32>, BTreeSet<(u32, u32)>) {
        ((0..n).collect(), edges.iter().copied().collect())
    }

    #[test]
    fn property_examples() {
        let (w, r) = frame(1, &[(0, 0)]);
        assert!(check_property(&w, &r, FrameProperty::Reflexive));
        let (w, r) = frame(1, &[]);
        assert!(!check_property(&w, &r, FrameProperty::Serial));
        assert!(check_property(&w, &r, FrameProperty::Transitive));
        let (w, r) = frame(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(!check_property(&w, &r, FrameProperty::ConverseWellFounded));
        assert!(check_property(&w, &r, FrameProperty::Irreflexive));
        let (w, r) = frame(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(check_property(&w, &r, FrameProperty::ConverseWellFounded));
        assert!(check_property(&w, &r, FrameProperty::Transitive));
        let (w, r) = frame(3, &[(0, 1), (0, 2), (1, 2), (2, 1), (1, 1), (2, 2)]);
        assert!(check_property(&w, &r, FrameProperty::Euclidean));
        assert!(!check_property(&w, &r, FrameProperty::Symmetric));
    }

    #[test]
    fn mask_and_set_checkers_agree_on_all_three_world_frames() {
        for n in 1..=3usize {
            for rel in 0..1u64 << (n * n) {
                let f = MaskFrame::from_rel_mask(n, rel);
                let worlds: BTreeSet<u32> = (0..n as u32).collect();
                let edges: BTreeSet<(u32, u32)> = f.edges().collect();
                for p in FrameProperty::ALL {
                    assert_eq!(f.has(p), check_property(&worlds, &edges, p), "{p:?} on {edges:?}");
                }
            }
        }
    }

    #[test]
    fn relation_facts_hold_on_small_frames() {
        use FrameProperty as P;
        for n in 1..=3usize {
            for rel in 0..1u64 << (n * n) {
                let f = MaskFrame::from_rel_mask(n, rel);
                assert!(!f.has(P::Reflexive) || f.has(P::Serial));
                assert!(!f.has(P::ConverseWellFounded) || f.has(P::Irreflexive));
                assert_eq!(
                    f.has(P::Symmetric) && f.has(P::Transitive),
                    f.has(P::Symmetric) && f.has(P::Euclidean)
                );
                assert!(!(f.has(P::Reflexive) && f.has(P::Euclidean)) || f.has(P::Symmetric));
                if f.has(P::Transitive) {
                    assert_eq!(f.has(P::ConverseWellFounded), f.has(P::Irreflexive));
                }
            }
        }
    }

    #[test]
    fn property_names_round_trip() {
        for p in FrameProperty::ALL {
            assert_eq!(FrameProperty::from_name(p.name()), Some(p));
        }
    }
}
