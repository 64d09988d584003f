//! JSON forms of models, proof trees, derivations and search outcomes.
//!
//! Formulas are stored as text in the ASCII grammar. Proof trees are a flat
//! node array with the root first, so deep proofs do not nest.

use std::collections::{BTreeMap, BTreeSet};

use kripke_core::semantics::ModelError;
use kripke_core::tableau::{
    proof_sequents, LabelledFormula, Principal, ProofNode, RelAtom, Rule,
};
use kripke_core::{
    parse, Derivation, Formula, Justification, KripkeModel, Logic, ParseError, ProofTree,
    SearchOutcome,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad formula `{text}`: {error}")]
    Formula { text: String, error: ParseError },
    #[error("unknown rule `{0}`")]
    Rule(String),
    #[error("unknown justification `{0}`")]
    Justification(String),
    #[error("step {step}: {by} takes {expected} arguments")]
    Arity { step: usize, by: String, expected: usize },
    #[error("step {0}: RN needs a nonempty `sub` derivation")]
    MissingSub(usize),
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

fn formula(text: &str) -> Result<Formula, FormatError> {
    parse(text).map_err(|error| FormatError::Formula { text: text.to_string(), error })
}

/// `{"worlds":[0,1],"rel":[[0,1]],"val":{"p":[0]}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub worlds: Vec<u32>,
    pub rel: Vec<[u32; 2]>,
    pub val: BTreeMap<String, Vec<u32>>,
}

impl From<&KripkeModel> for ModelJson {
    fn from(m: &KripkeModel) -> ModelJson {
        ModelJson {
            worlds: m.worlds().iter().copied().collect(),
            rel: m.rel().iter().map(|&(a, b)| [a, b]).collect(),
            val: m
                .val()
                .iter()
                .map(|(a, ext)| (a.clone(), ext.iter().copied().collect()))
                .collect(),
        }
    }
}

impl TryFrom<ModelJson> for KripkeModel {
    type Error = FormatError;

    fn try_from(j: ModelJson) -> Result<KripkeModel, FormatError> {
        let rel = j.rel.into_iter().map(|[a, b]| (a, b)).collect();
        let val = j
            .val
            .into_iter()
            .map(|(a, ext)| (a, ext.into_iter().collect::<BTreeSet<u32>>()))
            .collect();
        Ok(KripkeModel::new(j.worlds.into_iter().collect(), rel, val)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PrincipalJson {
    Formula { label: u32, formula: String },
    Lbox { label: u32, formula: String, edge: [u32; 2] },
    Rbox { label: u32, formula: String, fresh: u32 },
    Label { label: u32 },
    Edge { edge: [u32; 2] },
    Edges { edges: [[u32; 2]; 2] },
    Serial { label: u32, fresh: u32 },
}

fn edge(e: &RelAtom) -> [u32; 2] {
    [e.from, e.to]
}

fn rel_atom([from, to]: [u32; 2]) -> RelAtom {
    RelAtom::new(from, to)
}

impl From<&Principal> for PrincipalJson {
    fn from(p: &Principal) -> PrincipalJson {
        let text = |lf: &LabelledFormula| (lf.label, lf.formula.to_string());
        match p {
            Principal::Formula(lf) => {
                let (label, formula) = text(lf);
                PrincipalJson::Formula { label, formula }
            }
            Principal::LBox { boxed, edge: e } => {
                let (label, formula) = text(boxed);
                PrincipalJson::Lbox { label, formula, edge: edge(e) }
            }
            Principal::RBox { boxed, fresh } => {
                let (label, formula) = text(boxed);
                PrincipalJson::Rbox { label, formula, fresh: *fresh }
            }
            Principal::Label(x) => PrincipalJson::Label { label: *x },
            Principal::Edge(e) => PrincipalJson::Edge { edge: edge(e) },
            Principal::Edges(a, b) => PrincipalJson::Edges { edges: [edge(a), edge(b)] },
            Principal::Serial { label, fresh } => PrincipalJson::Serial { label: *label, fresh: *fresh },
        }
    }
}

impl TryFrom<&PrincipalJson> for Principal {
    type Error = FormatError;

    fn try_from(p: &PrincipalJson) -> Result<Principal, FormatError> {
        let lf = |label: u32, text: &str| Ok::<_, FormatError>(LabelledFormula::new(label, formula(text)?));
        Ok(match p {
            PrincipalJson::Formula { label, formula } => Principal::Formula(lf(*label, formula)?),
            PrincipalJson::Lbox { label, formula, edge } => Principal::LBox {
                boxed: lf(*label, formula)?,
                edge: rel_atom(*edge),
            },
            PrincipalJson::Rbox { label, formula, fresh } => Principal::RBox {
                boxed: lf(*label, formula)?,
                fresh: *fresh,
            },
            PrincipalJson::Label { label } => Principal::Label(*label),
            PrincipalJson::Edge { edge } => Principal::Edge(rel_atom(*edge)),
            PrincipalJson::Edges { edges: [a, b] } => Principal::Edges(rel_atom(*a), rel_atom(*b)),
            PrincipalJson::Serial { label, fresh } => Principal::Serial { label: *label, fresh: *fresh },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub rule: String,
    pub principal: PrincipalJson,
    /// The sequent the rule is applied to. Informational; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequent: Option<String>,
    pub premises: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofJson {
    pub goal: String,
    pub nodes: Vec<NodeJson>,
}

impl ProofJson {
    /// With `logic`, every node also carries its sequent.
    pub fn new(tree: &ProofTree, logic: Option<Logic>) -> ProofJson {
        let sequents = logic.and_then(|l| proof_sequents(tree, l).ok());
        ProofJson {
            goal: tree.goal.to_string(),
            nodes: tree
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| NodeJson {
                    rule: n.rule.name().to_string(),
                    principal: (&n.principal).into(),
                    sequent: sequents.as_ref().map(|s| s[i].to_string()),
                    premises: n.premises.clone(),
                })
                .collect(),
        }
    }

    pub fn to_tree(&self) -> Result<ProofTree, FormatError> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                Ok(ProofNode {
                    rule: Rule::from_name(&n.rule).ok_or_else(|| FormatError::Rule(n.rule.clone()))?,
                    principal: Principal::try_from(&n.principal)?,
                    premises: n.premises.clone(),
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(ProofTree { goal: formula(&self.goal)?, nodes })
    }
}

/// `{"f":"<formula>","by":"MP","args":[0,1]}`; RN steps carry `sub`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub f: String,
    pub by: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub: Option<Vec<StepJson>>,
}

/// A derivation file: either a bare step array or an object with optional
/// hypotheses and goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DerivationFile {
    Full {
        #[serde(default)]
        hyps: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        goal: Option<String>,
        steps: Vec<StepJson>,
    },
    Steps(Vec<StepJson>),
}

/// A parsed derivation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationInput {
    pub hyps: BTreeSet<Formula>,
    /// Defaults to the last step.
    pub goal: Option<Formula>,
    pub derivation: Derivation,
}

pub fn steps_to_json(d: &Derivation) -> Vec<StepJson> {
    d.steps
        .iter()
        .map(|s| {
            let (by, args, sub) = match &s.by {
                Justification::KAxiom => ("KAxiom", Vec::new(), None),
                Justification::SchemaAxiom => ("SchemaAxiom", Vec::new(), None),
                Justification::Hypothesis => ("Hypothesis", Vec::new(), None),
                Justification::MP(i, j) => ("MP", vec![*i, *j], None),
                Justification::RN(sub) => ("RN", Vec::new(), Some(steps_to_json(sub))),
            };
            StepJson { f: s.formula.to_string(), by: by.to_string(), args, sub }
        })
        .collect()
}

pub fn steps_from_json(steps: &[StepJson]) -> Result<Derivation, FormatError> {
    let mut d = Derivation::new();
    for (k, s) in steps.iter().enumerate() {
        let arity = |expected: usize| {
            if s.args.len() == expected {
                Ok(())
            } else {
                Err(FormatError::Arity { step: k, by: s.by.clone(), expected })
            }
        };
        let by = match s.by.as_str() {
            "KAxiom" => arity(0).map(|_| Justification::KAxiom)?,
            "SchemaAxiom" => arity(0).map(|_| Justification::SchemaAxiom)?,
            "Hypothesis" => arity(0).map(|_| Justification::Hypothesis)?,
            "MP" => arity(2).map(|_| Justification::MP(s.args[0], s.args[1]))?,
            "RN" => {
                arity(0)?;
                match &s.sub {
                    Some(sub) if !sub.is_empty() => Justification::RN(steps_from_json(sub)?),
                    _ => return Err(FormatError::MissingSub(k)),
                }
            }
            other => return Err(FormatError::Justification(other.to_string())),
        };
        d.push(formula(&s.f)?, by);
    }
    Ok(d)
}

impl DerivationFile {
    pub fn parse(text: &str) -> Result<DerivationInput, FormatError> {
        let file: DerivationFile = serde_json::from_str(text)?;
        let (hyps, goal, steps) = match file {
            DerivationFile::Full { hyps, goal, steps } => (hyps, goal, steps),
            DerivationFile::Steps(steps) => (Vec::new(), None, steps),
        };
        Ok(DerivationInput {
            hyps: hyps.iter().map(|h| formula(h)).collect::<Result<_, _>>()?,
            goal: goal.as_deref().map(formula).transpose()?,
            derivation: steps_from_json(&steps)?,
        })
    }

    pub fn new(input: &DerivationInput) -> DerivationFile {
        DerivationFile::Full {
            hyps: input.hyps.iter().map(Formula::to_string).collect(),
            goal: input.goal.as_ref().map(Formula::to_string),
            steps: steps_to_json(&input.derivation),
        }
    }
}

/// The result of `decide` and `countermodel`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum OutcomeJson {
    Theorem {
        logic: String,
        goal: String,
        proof: ProofJson,
    },
    NonTheorem {
        logic: String,
        goal: String,
        world: u32,
        countermodel: ModelJson,
    },
    Undetermined {
        logic: String,
        goal: String,
        steps: usize,
    },
}

impl OutcomeJson {
    pub fn new(logic: Logic, goal: &Formula, out: &SearchOutcome) -> OutcomeJson {
        let (logic_name, goal_text) = (logic.name().to_string(), goal.to_string());
        match out {
            SearchOutcome::Theorem(tree) => OutcomeJson::Theorem {
                logic: logic_name,
                goal: goal_text,
                proof: ProofJson::new(tree, Some(logic)),
            },
            SearchOutcome::NonTheorem { model, world, .. } => OutcomeJson::NonTheorem {
                logic: logic_name,
                goal: goal_text,
                world: *world,
                countermodel: model.into(),
            },
            SearchOutcome::Undetermined { steps } => OutcomeJson::Undetermined {
                logic: logic_name,
                goal: goal_text,
                steps: *steps,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kripke_core::{decide, replay_proof, DEFAULT_MAX_STEPS};

    #[test]
    fn model_schema_example() {
        let j: ModelJson = serde_json::from_str(r#"{"worlds":[0,1],"rel":[[0,1]],"val":{"p":[0]}}"#).unwrap();
        let m = KripkeModel::try_from(j.clone()).unwrap();
        assert!(m.is_true("p", 0) && !m.is_true("p", 1));
        assert_eq!(ModelJson::from(&m), j);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"worlds":[0,1],"rel":[[0,1]],"val":{"p":[0]}}"#);
    }

    #[test]
    fn bad_models_are_rejected() {
        let j: ModelJson = serde_json::from_str(r#"{"worlds":[0],"rel":[[0,3]],"val":{}}"#).unwrap();
        assert!(matches!(KripkeModel::try_from(j), Err(FormatError::Model(_))));
    }

    #[test]
    fn proofs_round_trip() {
        for (l, s) in [(Logic::K, "Box (p --> q) --> Box p --> Box q"), (Logic::GL, "Box (Box p --> p) --> Box p"), (Logic::K4, "Box p --> Box Box p"), (Logic::T, "Box p --> p")] {
            let SearchOutcome::Theorem(tree) = decide(l, &parse(s).unwrap(), DEFAULT_MAX_STEPS) else {
                panic!("{s}");
            };
            let text = serde_json::to_string(&ProofJson::new(&tree, Some(l))).unwrap();
            let back: ProofJson = serde_json::from_str(&text).unwrap();
            let tree2 = back.to_tree().unwrap();
            assert_eq!(tree2, tree);
            replay_proof(&tree2, l).unwrap();
        }
    }

    #[test]
    fn derivation_files() {
        let text = r#"{"hyps":["p"],"steps":[
            {"f":"p","by":"Hypothesis"},
            {"f":"p --> q --> p","by":"KAxiom"},
            {"f":"q --> p","by":"MP","args":[1,0]},
            {"f":"Box (p --> p)","by":"RN","sub":[{"f":"p --> p","by":"KAxiom"}]}
        ]}"#;
        let input = DerivationFile::parse(text).unwrap();
        assert_eq!(input.derivation.len(), 4);
        assert!(input.hyps.contains(&parse("p").unwrap()));
        let again = serde_json::to_string(&DerivationFile::new(&input)).unwrap();
        assert_eq!(DerivationFile::parse(&again).unwrap(), input);

        let bare = DerivationFile::parse(r#"[{"f":"p --> q --> p","by":"KAxiom"}]"#).unwrap();
        assert!(bare.hyps.is_empty() && bare.goal.is_none());

        assert!(matches!(
            DerivationFile::parse(r#"[{"f":"p","by":"MP","args":[0]}]"#),
            Err(FormatError::Arity { step: 0, .. })
        ));
        assert!(matches!(
            DerivationFile::parse(r#"[{"f":"Box p","by":"RN"}]"#),
            Err(FormatError::MissingSub(0))
        ));
        assert!(matches!(
            DerivationFile::parse(r#"[{"f":"p -->","by":"KAxiom"}]"#),
            Err(FormatError::Formula { .. })
        ));
        assert!(matches!(DerivationFile::parse(r#"[{"f":"p","by":"Cut"}]"#), Err(FormatError::Justification(_))));
    }

    #[test]
    fn outcomes_are_tagged_by_verdict() {
        let goal = parse("Box p --> p").unwrap();
        let out = decide(Logic::K, &goal, DEFAULT_MAX_STEPS);
        let v: serde_json::Value = serde_json::to_value(OutcomeJson::new(Logic::K, &goal, &out)).unwrap();
        assert_eq!(v["verdict"], "NonTheorem");
        assert_eq!(v["world"], 0);
        let back: OutcomeJson = serde_json::from_value(v).unwrap();
        assert!(matches!(back, OutcomeJson::NonTheorem { .. }));
    }
}
