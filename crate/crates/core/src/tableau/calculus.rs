//! Labelled sequents over plain formulas: rule application, proof replay
//! and countermodel extraction. Independent of the search engine.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::axiomatic::Logic;
use crate::formula::Formula;
use crate::semantics::{holds, KripkeModel};

/// `x : A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledFormula {
    pub label: u32,
    pub formula: Formula,
}

impl LabelledFormula {
    pub fn new(label: u32, formula: Formula) -> LabelledFormula {
        LabelledFormula { label, formula }
    }
}

impl fmt::Display for LabelledFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.formula)
    }
}

/// `x R y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelAtom {
    pub from: u32,
    pub to: u32,
}

impl RelAtom {
    pub fn new(from: u32, to: u32) -> RelAtom {
        RelAtom { from, to }
    }
}

impl fmt::Display for RelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}R{}", self.from, self.to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Id,
    LFalse,
    RTrue,
    Irrefl,
    LNot,
    RNot,
    LAnd,
    RAnd,
    LOr,
    ROr,
    LImp,
    RImp,
    LIff,
    RIff,
    LBox,
    RBox,
    RBoxLob,
    Refl,
    Trans,
    Ser,
    Sym,
    Eucl,
}

impl Rule {
    pub const ALL: [Rule; 22] = [
        Rule::Id,
        Rule::LFalse,
        Rule::RTrue,
        Rule::Irrefl,
        Rule::LNot,
        Rule::RNot,
        Rule::LAnd,
        Rule::RAnd,
        Rule::LOr,
        Rule::ROr,
        Rule::LImp,
        Rule::RImp,
        Rule::LIff,
        Rule::RIff,
        Rule::LBox,
        Rule::RBox,
        Rule::RBoxLob,
        Rule::Refl,
        Rule::Trans,
        Rule::Ser,
        Rule::Sym,
        Rule::Eucl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Id => "Id",
            Rule::LFalse => "LFalse",
            Rule::RTrue => "RTrue",
            Rule::Irrefl => "Irrefl",
            Rule::LNot => "LNot",
            Rule::RNot => "RNot",
            Rule::LAnd => "LAnd",
            Rule::RAnd => "RAnd",
            Rule::LOr => "LOr",
            Rule::ROr => "ROr",
            Rule::LImp => "LImp",
            Rule::RImp => "RImp",
            Rule::LIff => "LIff",
            Rule::RIff => "RIff",
            Rule::LBox => "LBox",
            Rule::RBox => "RBox",
            Rule::RBoxLob => "RBoxLob",
            Rule::Refl => "Refl",
            Rule::Trans => "Trans",
            Rule::Ser => "Ser",
            Rule::Sym => "Sym",
            Rule::Eucl => "Eucl",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Rules with no premises.
    pub fn is_closing(self) -> bool {
        matches!(self, Rule::Id | Rule::LFalse | Rule::RTrue | Rule::Irrefl)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a rule application acts on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Principal {
    /// Propositional rules and the closing rules on formulas.
    Formula(LabelledFormula),
    /// `x : Box A` on the left together with `x R y`.
    LBox { boxed: LabelledFormula, edge: RelAtom },
    /// `x : Box A` on the right and the fresh label of the premise.
    RBox { boxed: LabelledFormula, fresh: u32 },
    /// Refl instance.
    Label(u32),
    /// Irrefl and Sym.
    Edge(RelAtom),
    /// Trans (`xRy, yRz`) and Eucl (`xRy, xRz`).
    Edges(RelAtom, RelAtom),
    /// Ser: the label and the fresh successor.
    Serial { label: u32, fresh: u32 },
}

impl fmt::Display for Principal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Principal::Formula(lf) => write!(f, "{lf}"),
            Principal::LBox { boxed, edge } => write!(f, "{boxed}, {edge}"),
            Principal::RBox { boxed, fresh } => write!(f, "{boxed}, fresh {fresh}"),
            Principal::Label(x) => write!(f, "{x}"),
            Principal::Edge(e) => write!(f, "{e}"),
            Principal::Edges(a, b) => write!(f, "{a}, {b}"),
            Principal::Serial { label, fresh } => write!(f, "{label}, fresh {fresh}"),
        }
    }
}

/// The rules available on top of G3K.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub refl: bool,
    pub trans: bool,
    pub irrefl: bool,
    /// R□ is replaced by R□-Löb.
    pub lob: bool,
    pub ser: bool,
    pub sym: bool,
    pub eucl: bool,
}

impl RuleSet {
    pub fn for_logic(l: Logic) -> RuleSet {
        let none = RuleSet::default();
        match l {
            Logic::K => none,
            Logic::T => RuleSet { refl: true, ..none },
            Logic::K4 => RuleSet { trans: true, ..none },
            Logic::GL => RuleSet {
                trans: true,
                irrefl: true,
                lob: true,
                ..none
            },
        }
    }

    pub fn allows(&self, rule: Rule) -> bool {
        match rule {
            Rule::Irrefl => self.irrefl,
            Rule::RBox => !self.lob,
            Rule::RBoxLob => self.lob,
            Rule::Refl => self.refl,
            Rule::Trans => self.trans,
            Rule::Ser => self.ser,
            Rule::Sym => self.sym,
            Rule::Eucl => self.eucl,
            _ => true,
        }
    }
}

/// `R, Γ ⇒ Δ` with set semantics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub rel: BTreeSet<RelAtom>,
    pub left: BTreeSet<LabelledFormula>,
    pub right: BTreeSet<LabelledFormula>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule {0} is not part of the calculus")]
    NotInRuleSet(Rule),
    #[error("principal does not fit rule {0}")]
    WrongPrincipal(Rule),
    #[error("principal of {0} is not in the sequent")]
    Missing(Rule),
    #[error("label {0} is not fresh")]
    NotFresh(u32),
}

impl Sequent {
    /// `⇒ 0 : goal`, with diamonds rewritten.
    pub fn initial(goal: &Formula) -> Sequent {
        let mut s = Sequent::default();
        s.right.insert(LabelledFormula::new(0, goal.without_diamonds()));
        s
    }

    pub fn labels(&self) -> BTreeSet<u32> {
        let mut out: BTreeSet<u32> = self.left.iter().chain(&self.right).map(|lf| lf.label).collect();
        for e in &self.rel {
            out.insert(e.from);
            out.insert(e.to);
        }
        out
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.rel.contains(&RelAtom::new(a, b))
    }

    fn lookup<'a>(
        side: &'a BTreeSet<LabelledFormula>,
        p: &Principal,
        rule: Rule,
    ) -> Result<&'a LabelledFormula, RuleError> {
        let lf = match p {
            Principal::Formula(lf) => lf,
            Principal::LBox { boxed, .. } | Principal::RBox { boxed, .. } => boxed,
            _ => return Err(RuleError::WrongPrincipal(rule)),
        };
        side.get(lf).ok_or(RuleError::Missing(rule))
    }

    /// Whether a closing rule applies as stated.
    pub fn closes(&self, rule: Rule, p: &Principal, rules: &RuleSet) -> Result<(), RuleError> {
        if !rules.allows(rule) {
            return Err(RuleError::NotInRuleSet(rule));
        }
        match (rule, p) {
            (Rule::Id, Principal::Formula(lf)) => {
                if self.left.contains(lf) && self.right.contains(lf) {
                    Ok(())
                } else {
                    Err(RuleError::Missing(rule))
                }
            }
            (Rule::LFalse, Principal::Formula(lf)) if lf.formula == Formula::False => {
                Self::lookup(&self.left, p, rule).map(|_| ())
            }
            (Rule::RTrue, Principal::Formula(lf)) if lf.formula == Formula::True => {
                Self::lookup(&self.right, p, rule).map(|_| ())
            }
            (Rule::Irrefl, Principal::Edge(e)) if e.from == e.to => {
                if self.rel.contains(e) {
                    Ok(())
                } else {
                    Err(RuleError::Missing(rule))
                }
            }
            _ => Err(RuleError::WrongPrincipal(rule)),
        }
    }

    /// The premises of a non-closing rule application, left to right.
    pub fn premises(&self, rule: Rule, p: &Principal, rules: &RuleSet) -> Result<Vec<Sequent>, RuleError> {
        if !rules.allows(rule) {
            return Err(RuleError::NotInRuleSet(rule));
        }
        let wrong = RuleError::WrongPrincipal(rule);
        let with = |left: &[(u32, &Formula)], right: &[(u32, &Formula)], rel: &[(u32, u32)]| {
            let mut s = self.clone();
            for &(x, f) in left {
                s.left.insert(LabelledFormula::new(x, f.clone()));
            }
            for &(x, f) in right {
                s.right.insert(LabelledFormula::new(x, f.clone()));
            }
            for &(a, b) in rel {
                s.rel.insert(RelAtom::new(a, b));
            }
            s
        };
        match rule {
            Rule::LNot | Rule::LAnd | Rule::LOr | Rule::LImp | Rule::LIff => {
                let lf = Self::lookup(&self.left, p, rule)?;
                let x = lf.label;
                Ok(match (rule, &lf.formula) {
                    (Rule::LNot, Formula::Not(a)) => alloc::vec![with(&[], &[(x, a)], &[])],
                    (Rule::LAnd, Formula::And(a, b)) => alloc::vec![with(&[(x, a), (x, b)], &[], &[])],
                    (Rule::LOr, Formula::Or(a, b)) => {
                        alloc::vec![with(&[(x, a)], &[], &[]), with(&[(x, b)], &[], &[])]
                    }
                    (Rule::LImp, Formula::Imp(a, b)) => {
                        alloc::vec![with(&[], &[(x, a)], &[]), with(&[(x, b)], &[], &[])]
                    }
                    (Rule::LIff, Formula::Iff(a, b)) => alloc::vec![
                        with(&[(x, a), (x, b)], &[], &[]),
                        with(&[], &[(x, a), (x, b)], &[])
                    ],
                    _ => return Err(wrong),
                })
            }
            Rule::RNot | Rule::RAnd | Rule::ROr | Rule::RImp | Rule::RIff => {
                let lf = Self::lookup(&self.right, p, rule)?;
                let x = lf.label;
                Ok(match (rule, &lf.formula) {
                    (Rule::RNot, Formula::Not(a)) => alloc::vec![with(&[(x, a)], &[], &[])],
                    (Rule::RAnd, Formula::And(a, b)) => {
                        alloc::vec![with(&[], &[(x, a)], &[]), with(&[], &[(x, b)], &[])]
                    }
                    (Rule::ROr, Formula::Or(a, b)) => alloc::vec![with(&[], &[(x, a), (x, b)], &[])],
                    (Rule::RImp, Formula::Imp(a, b)) => alloc::vec![with(&[(x, a)], &[(x, b)], &[])],
                    (Rule::RIff, Formula::Iff(a, b)) => alloc::vec![
                        with(&[(x, a)], &[(x, b)], &[]),
                        with(&[(x, b)], &[(x, a)], &[])
                    ],
                    _ => return Err(wrong),
                })
            }
            Rule::LBox => {
                let Principal::LBox { edge, .. } = p else { return Err(wrong) };
                let lf = Self::lookup(&self.left, p, rule)?;
                let Formula::Box(a) = &lf.formula else { return Err(wrong) };
                if edge.from != lf.label {
                    return Err(wrong);
                }
                if !self.rel.contains(edge) {
                    return Err(RuleError::Missing(rule));
                }
                Ok(alloc::vec![with(&[(edge.to, a)], &[], &[])])
            }
            Rule::RBox | Rule::RBoxLob => {
                let Principal::RBox { fresh, .. } = p else { return Err(wrong) };
                let lf = Self::lookup(&self.right, p, rule)?;
                let Formula::Box(a) = &lf.formula else { return Err(wrong) };
                if self.labels().contains(fresh) {
                    return Err(RuleError::NotFresh(*fresh));
                }
                let y = *fresh;
                let edge = [(lf.label, y)];
                Ok(alloc::vec![if rule == Rule::RBoxLob {
                    with(&[(y, &lf.formula)], &[(y, a)], &edge)
                } else {
                    with(&[], &[(y, a)], &edge)
                }])
            }
            Rule::Refl => {
                let Principal::Label(x) = p else { return Err(wrong) };
                if !self.labels().contains(x) {
                    return Err(RuleError::Missing(rule));
                }
                Ok(alloc::vec![with(&[], &[], &[(*x, *x)])])
            }
            Rule::Trans | Rule::Eucl => {
                let Principal::Edges(e1, e2) = p else { return Err(wrong) };
                if !self.rel.contains(e1) || !self.rel.contains(e2) {
                    return Err(RuleError::Missing(rule));
                }
                let new = if rule == Rule::Trans && e1.to == e2.from {
                    (e1.from, e2.to)
                } else if rule == Rule::Eucl && e1.from == e2.from {
                    (e1.to, e2.to)
                } else {
                    return Err(wrong);
                };
                Ok(alloc::vec![with(&[], &[], &[new])])
            }
            Rule::Sym => {
                let Principal::Edge(e) = p else { return Err(wrong) };
                if !self.rel.contains(e) {
                    return Err(RuleError::Missing(rule));
                }
                Ok(alloc::vec![with(&[], &[], &[(e.to, e.from)])])
            }
            Rule::Ser => {
                let Principal::Serial { label, fresh } = p else { return Err(wrong) };
                let labels = self.labels();
                if !labels.contains(label) {
                    return Err(RuleError::Missing(rule));
                }
                if labels.contains(fresh) {
                    return Err(RuleError::NotFresh(*fresh));
                }
                Ok(alloc::vec![with(&[], &[], &[(*label, *fresh)])])
            }
            Rule::Id | Rule::LFalse | Rule::RTrue | Rule::Irrefl => Err(wrong),
        }
    }

    /// Some closing rule of `rules` applies.
    pub fn closing_instance(&self, rules: &RuleSet) -> Option<(Rule, Principal)> {
        if let Some(lf) = self.left.iter().find(|lf| lf.formula == Formula::False) {
            return Some((Rule::LFalse, Principal::Formula(lf.clone())));
        }
        if let Some(lf) = self.right.iter().find(|lf| lf.formula == Formula::True) {
            return Some((Rule::RTrue, Principal::Formula(lf.clone())));
        }
        if let Some(lf) = self.left.iter().find(|lf| self.right.contains(lf)) {
            return Some((Rule::Id, Principal::Formula(lf.clone())));
        }
        if rules.irrefl {
            if let Some(e) = self.rel.iter().find(|e| e.from == e.to) {
                return Some((Rule::Irrefl, Principal::Edge(*e)));
            }
        }
        None
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let s = if first { "" } else { ", " };
            first = false;
            f.write_str(s)
        };
        for e in &self.rel {
            sep(f)?;
            write!(f, "{e}")?;
        }
        for lf in &self.left {
            sep(f)?;
            write!(f, "{lf}")?;
        }
        f.write_str(if self.rel.is_empty() && self.left.is_empty() { "=> " } else { " => " })?;
        for (i, lf) in self.right.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lf}")?;
        }
        Ok(())
    }
}

/// A node of a proof: one rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub principal: Principal,
    /// Node indices of the premises, left to right.
    pub premises: Vec<usize>,
}

/// A proof of `⇒ 0 : goal`, stored as an arena whose root is node 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub goal: Formula,
    pub nodes: Vec<ProofNode>,
}

impl ProofTree {
    /// Longest root-to-leaf path, counted in nodes.
    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = alloc::vec![(0usize, 1usize)];
        while let Some((i, d)) = stack.pop() {
            if let Some(node) = self.nodes.get(i) {
                best = best.max(d);
                stack.extend(node.premises.iter().map(|&c| (c, d + 1)));
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("proof has no nodes")]
    Empty,
    #[error("node {0} is missing or reached twice")]
    BadLink(usize),
    #[error("node {node}: {error}")]
    Rule { node: usize, error: RuleError },
    #[error("node {node} has {found} premises, the rule gives {expected}")]
    PremiseCount { node: usize, expected: usize, found: usize },
}

/// Re-derives the sequent of every node from the root and checks each rule
/// application. Calls `visit` with each node index and its sequent.
pub fn replay_with(
    tree: &ProofTree,
    rules: &RuleSet,
    mut visit: impl FnMut(usize, &Sequent),
) -> Result<(), ReplayError> {
    if tree.nodes.is_empty() {
        return Err(ReplayError::Empty);
    }
    let mut seen = alloc::vec![false; tree.nodes.len()];
    let mut stack = alloc::vec![(0usize, Sequent::initial(&tree.goal))];
    while let Some((i, seq)) = stack.pop() {
        if seen.get(i) != Some(&false) {
            return Err(ReplayError::BadLink(i));
        }
        seen[i] = true;
        let node = &tree.nodes[i];
        visit(i, &seq);
        let premises = if node.rule.is_closing() {
            seq.closes(node.rule, &node.principal, rules)
                .map_err(|error| ReplayError::Rule { node: i, error })?;
            Vec::new()
        } else {
            seq.premises(node.rule, &node.principal, rules)
                .map_err(|error| ReplayError::Rule { node: i, error })?
        };
        if premises.len() != node.premises.len() {
            return Err(ReplayError::PremiseCount {
                node: i,
                expected: premises.len(),
                found: node.premises.len(),
            });
        }
        for (&c, s) in node.premises.iter().zip(premises).rev() {
            stack.push((c, s));
        }
    }
    Ok(())
}

/// Checks a proof against the calculus of `logic`.
pub fn replay_proof(tree: &ProofTree, logic: Logic) -> Result<(), ReplayError> {
    replay_with(tree, &RuleSet::for_logic(logic), |_, _| {})
}

/// The sequent at every node, indexed like `tree.nodes`.
pub fn proof_sequents(tree: &ProofTree, logic: Logic) -> Result<Vec<Sequent>, ReplayError> {
    let mut out = alloc::vec![Sequent::default(); tree.nodes.len()];
    replay_with(tree, &RuleSet::for_logic(logic), |i, s| out[i] = s.clone())?;
    Ok(out)
}

/// An open branch of a search: its top sequent plus saturation bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Branch {
    pub sequent: Sequent,
    /// Strictly exceeds every label in use.
    pub next_label: u32,
    /// For each label introduced by R□, the label it was introduced from.
    pub parents: BTreeMap<u32, u32>,
    pub applied_lbox: BTreeSet<(RelAtom, Formula)>,
    pub applied_rbox: BTreeSet<(u32, Formula)>,
    pub applied_refl: BTreeSet<u32>,
    /// Trans instances `(x, y, z)`.
    pub applied_trans: BTreeSet<(u32, u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("branch is closed by {0}")]
    Closed(Rule),
    #[error("rule {0} still applies to {1}")]
    NotSaturated(Rule, Principal),
    #[error("extracted model does not refute the branch: {0}")]
    VerificationFailed(&'static str),
}

impl Branch {
    fn formulas_at(side: &BTreeSet<LabelledFormula>, x: u32) -> BTreeSet<&Formula> {
        side.iter().filter(|lf| lf.label == x).map(|lf| &lf.formula).collect()
    }

    fn ancestors(&self, x: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = x;
        while let Some(&p) = self.parents.get(&cur) {
            if out.contains(&p) {
                break;
            }
            out.push(p);
            cur = p;
        }
        out
    }

    fn box_context(&self, x: u32) -> BTreeSet<&Formula> {
        let mut labels = self.ancestors(x);
        labels.push(x);
        self.sequent
            .left
            .iter()
            .filter(|lf| labels.contains(&lf.label) && matches!(lf.formula, Formula::Box(_)))
            .map(|lf| &lf.formula)
            .collect()
    }

    fn pending_rbox(&self, x: u32) -> impl Iterator<Item = &LabelledFormula> {
        self.sequent.right.iter().filter(move |lf| {
            lf.label == x
                && matches!(lf.formula, Formula::Box(_))
                && !self.applied_rbox.contains(&(x, lf.formula.clone()))
        })
    }

    /// The nearest strict ancestor that blocks `x`, for K4.
    ///
    /// `y` blocks `x` when every left formula of `x` is on the left at `y`,
    /// every right box of `x` is on the right at `y`, the left boxes of `x`
    /// and its ancestors are among those of `y` and its ancestors, and `y`
    /// has no pending R□ instance.
    pub fn blocker(&self, x: u32) -> Option<u32> {
        let left_x = Self::formulas_at(&self.sequent.left, x);
        let right_x: BTreeSet<&Formula> = Self::formulas_at(&self.sequent.right, x)
            .into_iter()
            .filter(|f| matches!(f, Formula::Box(_)))
            .collect();
        let ctx_x = self.box_context(x);
        self.ancestors(x).into_iter().find(|&y| {
            left_x.is_subset(&Self::formulas_at(&self.sequent.left, y))
                && right_x.is_subset(&Self::formulas_at(&self.sequent.right, y))
                && ctx_x.is_subset(&self.box_context(y))
                && self.pending_rbox(y).next().is_none()
        })
    }

    /// A rule instance the branch is not saturated for, if any.
    pub fn open_instance(&self, logic: Logic) -> Option<(Rule, Principal)> {
        let s = &self.sequent;
        let rules = RuleSet::for_logic(logic);
        let l = |x: u32, f: &Formula| s.left.contains(&LabelledFormula::new(x, f.clone()));
        let r = |x: u32, f: &Formula| s.right.contains(&LabelledFormula::new(x, f.clone()));
        let at = |lf: &LabelledFormula| Principal::Formula(lf.clone());
        for lf in &s.left {
            let x = lf.label;
            let rule = match &lf.formula {
                Formula::Not(a) if !r(x, a) => Rule::LNot,
                Formula::And(a, b) if !(l(x, a) && l(x, b)) => Rule::LAnd,
                Formula::Or(a, b) if !(l(x, a) || l(x, b)) => Rule::LOr,
                Formula::Imp(a, b) if !(r(x, a) || l(x, b)) => Rule::LImp,
                Formula::Iff(a, b) if !((l(x, a) && l(x, b)) || (r(x, a) && r(x, b))) => Rule::LIff,
                Formula::Box(a) => {
                    let missing = s
                        .rel
                        .iter()
                        .filter(|e| e.from == x)
                        .find(|e| !l(e.to, a) && !self.applied_lbox.contains(&(**e, lf.formula.clone())));
                    match missing {
                        Some(e) => {
                            return Some((Rule::LBox, Principal::LBox { boxed: lf.clone(), edge: *e }))
                        }
                        None => continue,
                    }
                }
                _ => continue,
            };
            return Some((rule, at(lf)));
        }
        for lf in &s.right {
            let x = lf.label;
            let rule = match &lf.formula {
                Formula::Not(a) if !l(x, a) => Rule::RNot,
                Formula::And(a, b) if !(r(x, a) || r(x, b)) => Rule::RAnd,
                Formula::Or(a, b) if !(r(x, a) && r(x, b)) => Rule::ROr,
                Formula::Imp(a, b) if !(l(x, a) && r(x, b)) => Rule::RImp,
                Formula::Iff(a, b) if !((l(x, a) && r(x, b)) || (l(x, b) && r(x, a))) => Rule::RIff,
                _ => continue,
            };
            return Some((rule, at(lf)));
        }
        let labels = s.labels();
        if rules.refl {
            if let Some(&x) = labels
                .iter()
                .find(|&&x| !s.has_edge(x, x) && !self.applied_refl.contains(&x))
            {
                return Some((Rule::Refl, Principal::Label(x)));
            }
        }
        if rules.trans {
            for e1 in &s.rel {
                for e2 in s.rel.iter().filter(|e| e.from == e1.to) {
                    if !s.has_edge(e1.from, e2.to)
                        && !self.applied_trans.contains(&(e1.from, e1.to, e2.to))
                    {
                        return Some((Rule::Trans, Principal::Edges(*e1, *e2)));
                    }
                }
            }
        }
        for &x in &labels {
            if logic == Logic::K4 && self.blocker(x).is_some() {
                continue;
            }
            if let Some(lf) = self.pending_rbox(x).next() {
                let rule = if rules.lob { Rule::RBoxLob } else { Rule::RBox };
                return Some((rule, Principal::RBox { boxed: lf.clone(), fresh: self.next_label }));
            }
        }
        None
    }

    /// The countermodel of a saturated open branch, rooted at label 0.
    ///
    /// Worlds are the labels, the relation is the relational atoms closed
    /// under the logic's frame conditions, and an atom holds where it occurs
    /// on the left. A K4 label blocked by `y` also sees every successor of
    /// `y`. The model is checked to satisfy every left formula and refute
    /// every right formula at its label.
    pub fn extract_countermodel(&self, logic: Logic) -> Result<(KripkeModel, u32), ExtractError> {
        if let Some((rule, _)) = self.sequent.closing_instance(&RuleSet::for_logic(logic)) {
            return Err(ExtractError::Closed(rule));
        }
        if let Some((rule, p)) = self.open_instance(logic) {
            return Err(ExtractError::NotSaturated(rule, p));
        }
        let s = &self.sequent;
        let mut worlds = s.labels();
        worlds.insert(0);
        let mut rel: BTreeSet<(u32, u32)> = s.rel.iter().map(|e| (e.from, e.to)).collect();
        if logic == Logic::K4 {
            for &x in &worlds {
                if self.pending_rbox(x).next().is_none() {
                    continue;
                }
                if let Some(y) = self.blocker(x) {
                    for e in s.rel.iter().filter(|e| e.from == y) {
                        rel.insert((x, e.to));
                    }
                }
            }
        }
        match logic {
            Logic::T => rel.extend(worlds.iter().map(|&w| (w, w))),
            Logic::K4 | Logic::GL => transitive_closure(&mut rel),
            Logic::K => {}
        }
        let mut val: BTreeMap<alloc::string::String, BTreeSet<u32>> = BTreeMap::new();
        for lf in &s.left {
            if let Formula::Atom(a) = &lf.formula {
                val.entry(a.clone()).or_default().insert(lf.label);
            }
        }
        let model = KripkeModel::new(worlds, rel, val)
            .map_err(|_| ExtractError::VerificationFailed("malformed model"))?;
        if !model.in_class(logic.frame_class()) {
            return Err(ExtractError::VerificationFailed("frame outside the logic's class"));
        }
        for lf in &s.left {
            if holds(&model, &lf.formula, lf.label) != Ok(true) {
                return Err(ExtractError::VerificationFailed("a left formula is false"));
            }
        }
        for lf in &s.right {
            if holds(&model, &lf.formula, lf.label) != Ok(false) {
                return Err(ExtractError::VerificationFailed("a right formula is true"));
            }
        }
        Ok((model, 0))
    }
}

/// Free-function form of [`Branch::extract_countermodel`].
pub fn extract_countermodel(branch: &Branch, logic: Logic) -> Result<(KripkeModel, u32), ExtractError> {
    branch.extract_countermodel(logic)
}

fn transitive_closure(rel: &mut BTreeSet<(u32, u32)>) {
    loop {
        let extra: Vec<(u32, u32)> = rel
            .iter()
            .flat_map(|&(a, b)| {
                rel.range((b, 0)..=(b, u32::MAX))
                    .map(move |&(_, c)| (a, c))
            })
            .filter(|e| !rel.contains(e))
            .collect();
        if extra.is_empty() {
            return;
        }
        rel.extend(extra);
    }
}
