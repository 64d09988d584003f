//! Root-first search over interned subformulas.
//!
//! Every formula a rule can introduce is a subformula of the goal, so each
//! label carries two bitsets (left and right) over the goal's subformulas.
//! Branching clones the state; the search is depth-first, left premise
//! first, with an explicit stack.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::calculus::{Branch, LabelledFormula, Principal, ProofNode, ProofTree, RelAtom, Rule, RuleSet, Sequent};
use crate::axiomatic::Logic;
use crate::formula::Formula;
use crate::semantics::KripkeModel;

#[derive(Clone, Copy, Debug)]
enum Kind {
    False,
    True,
    Atom,
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Iff(u32, u32),
    Box(u32),
}

struct Universe {
    kinds: Vec<Kind>,
    formulas: Vec<Formula>,
    /// Box subformulas, ordered by their printed text.
    boxes: Vec<u32>,
    box_mask: Vec<u64>,
    words: usize,
    root: u32,
}

impl Universe {
    fn new(goal: &Formula) -> Universe {
        let mut u = Universe {
            kinds: Vec::new(),
            formulas: Vec::new(),
            boxes: Vec::new(),
            box_mask: Vec::new(),
            words: 0,
            root: 0,
        };
        let mut index = BTreeMap::new();
        u.root = u.intern(goal, &mut index);
        u.words = u.kinds.len().div_ceil(64);
        u.box_mask = alloc::vec![0; u.words];
        let mut boxes: Vec<(alloc::string::String, u32)> = Vec::new();
        for (i, k) in u.kinds.iter().enumerate() {
            if let Kind::Box(_) = k {
                u.box_mask[i / 64] |= 1 << (i % 64);
                boxes.push((alloc::format!("{}", u.formulas[i]), i as u32));
            }
        }
        boxes.sort();
        u.boxes = boxes.into_iter().map(|(_, i)| i).collect();
        u
    }

    fn intern(&mut self, f: &Formula, index: &mut BTreeMap<Formula, u32>) -> u32 {
        if let Some(&i) = index.get(f) {
            return i;
        }
        let kind = match f {
            Formula::False => Kind::False,
            Formula::True => Kind::True,
            Formula::Atom(_) => Kind::Atom,
            Formula::Not(a) => Kind::Not(self.intern(a, index)),
            Formula::Box(a) => Kind::Box(self.intern(a, index)),
            Formula::And(a, b) => Kind::And(self.intern(a, index), self.intern(b, index)),
            Formula::Or(a, b) => Kind::Or(self.intern(a, index), self.intern(b, index)),
            Formula::Imp(a, b) => Kind::Imp(self.intern(a, index), self.intern(b, index)),
            Formula::Iff(a, b) => Kind::Iff(self.intern(a, index), self.intern(b, index)),
            Formula::Diam(_) => unreachable!("diamonds are rewritten before search"),
        };
        let id = self.kinds.len() as u32;
        self.kinds.push(kind);
        self.formulas.push(f.clone());
        index.insert(f.clone(), id);
        id
    }
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone)]
struct State {
    words: usize,
    left: Vec<u64>,
    right: Vec<u64>,
    rdone: Vec<u64>,
    succ: Vec<Vec<u32>>,
    parent: Vec<u32>,
}

fn bit(v: &[u64], words: usize, x: u32, id: u32) -> bool {
    let i = x as usize * words + id as usize / 64;
    v[i] >> (id % 64) & 1 == 1
}

fn set_bit(v: &mut [u64], words: usize, x: u32, id: u32) -> bool {
    let i = x as usize * words + id as usize / 64;
    let m = 1u64 << (id % 64);
    let fresh = v[i] & m == 0;
    v[i] |= m;
    fresh
}

fn ids(v: &[u64], words: usize, x: u32) -> impl Iterator<Item = u32> + '_ {
    let row = &v[x as usize * words..(x as usize + 1) * words];
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        core::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros();
            rest &= rest - 1;
            Some(w as u32 * 64 + b)
        })
    })
}

impl State {
    fn new(words: usize) -> State {
        let mut s = State {
            words,
            left: Vec::new(),
            right: Vec::new(),
            rdone: Vec::new(),
            succ: Vec::new(),
            parent: Vec::new(),
        };
        s.add_label(NO_PARENT);
        s
    }

    fn labels(&self) -> u32 {
        self.parent.len() as u32
    }

    fn add_label(&mut self, parent: u32) -> u32 {
        let w = self.words;
        self.left.extend(core::iter::repeat_n(0, w));
        self.right.extend(core::iter::repeat_n(0, w));
        self.rdone.extend(core::iter::repeat_n(0, w));
        self.succ.push(Vec::new());
        self.parent.push(parent);
        self.labels() - 1
    }

    fn row<'a>(&self, v: &'a [u64], x: u32) -> &'a [u64] {
        &v[x as usize * self.words..(x as usize + 1) * self.words]
    }

    fn has_left(&self, x: u32, id: u32) -> bool {
        bit(&self.left, self.words, x, id)
    }

    fn has_right(&self, x: u32, id: u32) -> bool {
        bit(&self.right, self.words, x, id)
    }

    fn has_edge(&self, x: u32, y: u32) -> bool {
        self.succ[x as usize].contains(&y)
    }
}

#[derive(Clone, Copy, Debug)]
enum Close {
    Id(u32, u32),
    LFalse(u32, u32),
    RTrue(u32, u32),
    Irrefl(u32),
}

#[derive(Clone, Copy, Debug)]
enum App {
    Prop(Rule, u32, u32),
    LBox(u32, u32, u32),
    Refl(u32),
    Trans(u32, u32, u32),
    RBox(u32, u32),
}

/// Parent slot of the next node: none for the root.
type Slot = Option<(usize, usize)>;

pub(crate) enum Found {
    Theorem(Option<ProofTree>),
    /// An open branch, with its verified countermodel when one was built.
    Open(Option<(KripkeModel, u32, Branch)>),
    Undetermined(usize),
}

pub(crate) struct Search {
    u: Universe,
    logic: Logic,
    rules: RuleSet,
    max_steps: usize,
    steps: usize,
    record: bool,
    nodes: Vec<ProofNode>,
}

impl Search {
    /// `goal` must be diamond-free. With `record`, theorems come with a proof
    /// and open branches with a verified countermodel.
    pub fn run(logic: Logic, goal: &Formula, max_steps: usize, record: bool) -> Found {
        let mut search = Search {
            u: Universe::new(goal),
            logic,
            rules: RuleSet::for_logic(logic),
            max_steps,
            steps: 0,
            record,
            nodes: Vec::new(),
        };
        search.go(goal)
    }

    fn go(&mut self, goal: &Formula) -> Found {
        let mut root = State::new(self.u.words);
        let c = self.add_right(&mut root, 0, self.u.root);
        let mut stack: Vec<(State, Slot, Option<Close>)> = alloc::vec![(root, None, c)];
        let mut unresolved = false;
        while let Some((mut s, mut slot, mut close)) = stack.pop() {
            loop {
                if let Some(c) = close {
                    let (rule, p) = self.close_principal(c);
                    self.push_node(slot, rule, p, 0);
                    break;
                }
                let Some(app) = self.find(&s) else {
                    match self.resolve_open(&s) {
                        Some(found) => return Found::Open(found),
                        None => {
                            unresolved = true;
                            break;
                        }
                    }
                };
                if self.steps >= self.max_steps {
                    return Found::Undetermined(self.steps);
                }
                self.steps += 1;
                let (rule, p) = self.app_principal(&s, app);
                match self.apply(&mut s, app) {
                    (c1, None) => {
                        let node = self.push_node(slot, rule, p, 1);
                        slot = Some((node, 0));
                        close = c1;
                    }
                    (c1, Some((s2, c2))) => {
                        let node = self.push_node(slot, rule, p, 2);
                        stack.push((s2, Some((node, 1)), c2));
                        slot = Some((node, 0));
                        close = c1;
                    }
                }
            }
        }
        if unresolved {
            return Found::Undetermined(self.steps);
        }
        Found::Theorem(self.record.then(|| ProofTree {
            goal: goal.clone(),
            nodes: core::mem::take(&mut self.nodes),
        }))
    }

    fn push_node(&mut self, slot: Slot, rule: Rule, p: Option<Principal>, premises: usize) -> usize {
        if !self.record {
            return 0;
        }
        let idx = self.nodes.len();
        self.nodes.push(ProofNode {
            rule,
            principal: p.expect("principal is recorded"),
            premises: alloc::vec![usize::MAX; premises],
        });
        if let Some((parent, k)) = slot {
            self.nodes[parent].premises[k] = idx;
        }
        idx
    }

    fn lf(&self, x: u32, id: u32) -> LabelledFormula {
        LabelledFormula::new(x, self.u.formulas[id as usize].clone())
    }

    fn close_principal(&self, c: Close) -> (Rule, Option<Principal>) {
        let (rule, p) = match c {
            Close::Id(x, id) => (Rule::Id, (x, id)),
            Close::LFalse(x, id) => (Rule::LFalse, (x, id)),
            Close::RTrue(x, id) => (Rule::RTrue, (x, id)),
            Close::Irrefl(x) => {
                return (Rule::Irrefl, Some(Principal::Edge(RelAtom::new(x, x))));
            }
        };
        (rule, self.record.then(|| Principal::Formula(self.lf(p.0, p.1))))
    }

    fn app_principal(&self, s: &State, app: App) -> (Rule, Option<Principal>) {
        let rule = match app {
            App::Prop(r, ..) => r,
            App::LBox(..) => Rule::LBox,
            App::Refl(_) => Rule::Refl,
            App::Trans(..) => Rule::Trans,
            App::RBox(..) if self.rules.lob => Rule::RBoxLob,
            App::RBox(..) => Rule::RBox,
        };
        if !self.record {
            return (rule, None);
        }
        let p = match app {
            App::Prop(_, x, id) => Principal::Formula(self.lf(x, id)),
            App::LBox(x, y, id) => Principal::LBox {
                boxed: self.lf(x, id),
                edge: RelAtom::new(x, y),
            },
            App::Refl(x) => Principal::Label(x),
            App::Trans(x, y, z) => Principal::Edges(RelAtom::new(x, y), RelAtom::new(y, z)),
            App::RBox(x, id) => Principal::RBox {
                boxed: self.lf(x, id),
                fresh: s.labels(),
            },
        };
        (rule, Some(p))
    }

    fn add_left(&self, s: &mut State, x: u32, id: u32) -> Option<Close> {
        if !set_bit(&mut s.left, s.words, x, id) {
            return None;
        }
        if let Kind::False = self.u.kinds[id as usize] {
            return Some(Close::LFalse(x, id));
        }
        s.has_right(x, id).then_some(Close::Id(x, id))
    }

    fn add_right(&self, s: &mut State, x: u32, id: u32) -> Option<Close> {
        if !set_bit(&mut s.right, s.words, x, id) {
            return None;
        }
        if let Kind::True = self.u.kinds[id as usize] {
            return Some(Close::RTrue(x, id));
        }
        s.has_left(x, id).then_some(Close::Id(x, id))
    }

    fn add_edge(&self, s: &mut State, x: u32, y: u32) -> Option<Close> {
        if s.has_edge(x, y) {
            return None;
        }
        s.succ[x as usize].push(y);
        (self.rules.irrefl && x == y).then_some(Close::Irrefl(x))
    }

    /// The next rule instance by priority, respecting saturation.
    fn find(&self, s: &State) -> Option<App> {
        let w = s.words;
        let n = s.labels();
        let kinds = &self.u.kinds;
        // Non-branching propositional rules, then branching ones.
        for branching in [false, true] {
            for x in 0..n {
                for id in ids(&s.left, w, x) {
                    let rule = match kinds[id as usize] {
                        Kind::Not(a) if !branching && !s.has_right(x, a) => Rule::LNot,
                        Kind::And(a, b) if !branching && !(s.has_left(x, a) && s.has_left(x, b)) => {
                            Rule::LAnd
                        }
                        Kind::Or(a, b) if branching && !(s.has_left(x, a) || s.has_left(x, b)) => Rule::LOr,
                        Kind::Imp(a, b) if branching && !(s.has_right(x, a) || s.has_left(x, b)) => {
                            Rule::LImp
                        }
                        Kind::Iff(a, b)
                            if branching
                                && !((s.has_left(x, a) && s.has_left(x, b))
                                    || (s.has_right(x, a) && s.has_right(x, b))) =>
                        {
                            Rule::LIff
                        }
                        _ => continue,
                    };
                    return Some(App::Prop(rule, x, id));
                }
                for id in ids(&s.right, w, x) {
                    let rule = match kinds[id as usize] {
                        Kind::Not(a) if !branching && !s.has_left(x, a) => Rule::RNot,
                        Kind::Or(a, b) if !branching && !(s.has_right(x, a) && s.has_right(x, b)) => {
                            Rule::ROr
                        }
                        Kind::Imp(a, b) if !branching && !(s.has_left(x, a) && s.has_right(x, b)) => {
                            Rule::RImp
                        }
                        Kind::And(a, b) if branching && !(s.has_right(x, a) || s.has_right(x, b)) => {
                            Rule::RAnd
                        }
                        Kind::Iff(a, b)
                            if branching
                                && !((s.has_left(x, a) && s.has_right(x, b))
                                    || (s.has_left(x, b) && s.has_right(x, a))) =>
                        {
                            Rule::RIff
                        }
                        _ => continue,
                    };
                    return Some(App::Prop(rule, x, id));
                }
            }
        }
        for x in 0..n {
            for id in ids(&s.left, w, x) {
                if let Kind::Box(a) = kinds[id as usize] {
                    if let Some(&y) = s.succ[x as usize].iter().find(|&&y| !s.has_left(y, a)) {
                        return Some(App::LBox(x, y, id));
                    }
                }
            }
        }
        if self.rules.refl {
            if let Some(x) = (0..n).find(|&x| !s.has_edge(x, x)) {
                return Some(App::Refl(x));
            }
        }
        if self.rules.trans {
            for x in 0..n {
                for &y in &s.succ[x as usize] {
                    if let Some(&z) = s.succ[y as usize].iter().find(|&&z| !s.has_edge(x, z)) {
                        return Some(App::Trans(x, y, z));
                    }
                }
            }
        }
        for x in 0..n {
            if !self.has_pending_rbox(s, x) {
                continue;
            }
            if self.logic == Logic::K4 && self.blocker(s, x).is_some() {
                continue;
            }
            let id = self
                .u
                .boxes
                .iter()
                .copied()
                .find(|&id| s.has_right(x, id) && !bit(&s.rdone, w, x, id))
                .expect("pending box exists");
            return Some(App::RBox(x, id));
        }
        None
    }

    fn has_pending_rbox(&self, s: &State, x: u32) -> bool {
        let (r, d) = (s.row(&s.right, x), s.row(&s.rdone, x));
        (0..s.words).any(|i| r[i] & self.u.box_mask[i] & !d[i] != 0)
    }

    /// Same condition as [`Branch::blocker`], on bitsets.
    fn blocker(&self, s: &State, x: u32) -> Option<u32> {
        let w = s.words;
        let bm = &self.u.box_mask;
        let mut chain = alloc::vec![x];
        let mut cur = x;
        while s.parent[cur as usize] != NO_PARENT {
            cur = s.parent[cur as usize];
            chain.push(cur);
        }
        // ctx[i]: left boxes of chain[i] and everything above it.
        let mut ctx = alloc::vec![alloc::vec![0u64; w]; chain.len()];
        for i in (0..chain.len()).rev() {
            let l = s.row(&s.left, chain[i]);
            for k in 0..w {
                let above = if i + 1 < chain.len() { ctx[i + 1][k] } else { 0 };
                ctx[i][k] = above | (l[k] & bm[k]);
            }
        }
        let (lx, rx) = (s.row(&s.left, x), s.row(&s.right, x));
        (1..chain.len()).map(|i| (i, chain[i])).find_map(|(i, y)| {
            let (ly, ry, dy) = (s.row(&s.left, y), s.row(&s.right, y), s.row(&s.rdone, y));
            let ok = (0..w).all(|k| {
                lx[k] & !ly[k] == 0
                    && rx[k] & bm[k] & !ry[k] == 0
                    && ctx[0][k] & !ctx[i][k] == 0
                    && ry[k] & bm[k] & !dy[k] == 0
            });
            ok.then_some(y)
        })
    }

    /// Applies `app` to `s` in place. A branching rule also returns the
    /// second premise. Each premise comes with its closure, if any.
    fn apply(&self, s: &mut State, app: App) -> (Option<Close>, Option<(State, Option<Close>)>) {
        let kinds = &self.u.kinds;
        let both = |a: Option<Close>, b: Option<Close>| a.or(b);
        match app {
            App::Prop(rule, x, id) => {
                let k = kinds[id as usize];
                match (rule, k) {
                    (Rule::LNot, Kind::Not(a)) => (self.add_right(s, x, a), None),
                    (Rule::RNot, Kind::Not(a)) => (self.add_left(s, x, a), None),
                    (Rule::LAnd, Kind::And(a, b)) => {
                        let c = self.add_left(s, x, a);
                        (both(c, self.add_left(s, x, b)), None)
                    }
                    (Rule::ROr, Kind::Or(a, b)) => {
                        let c = self.add_right(s, x, a);
                        (both(c, self.add_right(s, x, b)), None)
                    }
                    (Rule::RImp, Kind::Imp(a, b)) => {
                        let c = self.add_left(s, x, a);
                        (both(c, self.add_right(s, x, b)), None)
                    }
                    _ => {
                        let mut s2 = s.clone();
                        let (c1, c2) = match (rule, k) {
                            (Rule::LOr, Kind::Or(a, b)) => (self.add_left(s, x, a), self.add_left(&mut s2, x, b)),
                            (Rule::LImp, Kind::Imp(a, b)) => {
                                (self.add_right(s, x, a), self.add_left(&mut s2, x, b))
                            }
                            (Rule::RAnd, Kind::And(a, b)) => {
                                (self.add_right(s, x, a), self.add_right(&mut s2, x, b))
                            }
                            (Rule::LIff, Kind::Iff(a, b)) => {
                                let c1 = self.add_left(s, x, a);
                                let c1 = both(c1, self.add_left(s, x, b));
                                let c2 = self.add_right(&mut s2, x, a);
                                (c1, both(c2, self.add_right(&mut s2, x, b)))
                            }
                            (Rule::RIff, Kind::Iff(a, b)) => {
                                let c1 = self.add_left(s, x, a);
                                let c1 = both(c1, self.add_right(s, x, b));
                                let c2 = self.add_left(&mut s2, x, b);
                                (c1, both(c2, self.add_right(&mut s2, x, a)))
                            }
                            _ => unreachable!("rule does not match the formula"),
                        };
                        (c1, Some((s2, c2)))
                    }
                }
            }
            App::LBox(_, y, id) => {
                let Kind::Box(a) = kinds[id as usize] else { unreachable!() };
                (self.add_left(s, y, a), None)
            }
            App::Refl(x) => (self.add_edge(s, x, x), None),
            App::Trans(x, _, z) => (self.add_edge(s, x, z), None),
            App::RBox(x, id) => {
                let Kind::Box(a) = kinds[id as usize] else { unreachable!() };
                set_bit(&mut s.rdone, s.words, x, id);
                let y = s.add_label(x);
                let mut c = self.add_edge(s, x, y);
                if self.rules.lob {
                    c = both(c, self.add_left(s, y, id));
                }
                (both(c, self.add_right(s, y, a)), None)
            }
        }
    }

    /// Handles a saturated open branch. `None` means its countermodel failed
    /// verification and the branch stays unresolved.
    fn resolve_open(&self, s: &State) -> Option<Option<(KripkeModel, u32, Branch)>> {
        let relies_on_blocking =
            self.logic == Logic::K4 && (0..s.labels()).any(|x| self.has_pending_rbox(s, x));
        if !self.record && !relies_on_blocking {
            return Some(None);
        }
        let branch = self.to_branch(s);
        match branch.extract_countermodel(self.logic) {
            Ok((model, world)) => Some(self.record.then_some((model, world, branch))),
            Err(e) => {
                debug_assert!(relies_on_blocking, "unblocked branch failed extraction: {e}");
                None
            }
        }
    }

    fn to_branch(&self, s: &State) -> Branch {
        let w = s.words;
        let mut b = Branch {
            next_label: s.labels(),
            ..Branch::default()
        };
        let mut seq = Sequent::default();
        for x in 0..s.labels() {
            seq.left.extend(ids(&s.left, w, x).map(|id| self.lf(x, id)));
            seq.right.extend(ids(&s.right, w, x).map(|id| self.lf(x, id)));
            for &y in &s.succ[x as usize] {
                seq.rel.insert(RelAtom::new(x, y));
            }
            if s.parent[x as usize] != NO_PARENT {
                b.parents.insert(x, s.parent[x as usize]);
            }
            for id in ids(&s.rdone, w, x) {
                b.applied_rbox.insert((x, self.u.formulas[id as usize].clone()));
            }
            if self.rules.refl && s.has_edge(x, x) {
                b.applied_refl.insert(x);
            }
            for id in ids(&s.left, w, x) {
                if let Kind::Box(a) = self.u.kinds[id as usize] {
                    for &y in s.succ[x as usize].iter().filter(|&&y| s.has_left(y, a)) {
                        b.applied_lbox
                            .insert((RelAtom::new(x, y), self.u.formulas[id as usize].clone()));
                    }
                }
            }
        }
        if self.rules.trans {
            let trans: BTreeSet<(u32, u32, u32)> = (0..s.labels())
                .flat_map(|x| {
                    s.succ[x as usize].iter().flat_map(move |&y| {
                        s.succ[y as usize].iter().map(move |&z| (x, y, z))
                    })
                })
                .collect();
            b.applied_trans = trans;
        }
        b.sequent = seq;
        b
    }
}
