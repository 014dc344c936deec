//! JSON and DOT artifacts, and their independent re-verification.
//!
//! Every JSON document carries `"schema": "seqcalc/v1"` and a `kind` tag.
//! Sequents, formulas and terms are stored as strings in the parser's
//! grammar, so a document can be checked without trusting the emitter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kripke::{self, KripkeModel, ModelKind, World};
use crate::parser::{parse_formula, parse_sequent, parse_term};
use crate::pspace::PspaceStats;
use crate::rules::{self, Deduction, Rule};
use crate::sequent::Sequent;
use crate::staged::StagedTree;

pub const SCHEMA: &str = "seqcalc/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationNode {
    pub sequent: String,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvariable: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<String>,
    pub children: Vec<DerivationNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldJson {
    pub id: usize,
    pub atoms: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vars: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub kind: String,
    pub root: usize,
    pub worlds: Vec<WorldJson>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub mode: String,
    pub verdict: String,
    pub sequent_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worlds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staged_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_record_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_max_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_visited: Option<usize>,
}

impl Stats {
    pub fn with_pspace(mut self, p: &PspaceStats) -> Stats {
        self.max_record_size = Some(p.max_record_size);
        self.branch_max_len = Some(p.branch_max_len);
        self.nodes_visited = Some(p.nodes_visited);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub addr: Vec<usize>,
    pub sequent: String,
    pub gate: String,
    pub expanded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub stage: usize,
    pub nodes: Vec<SnapshotNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Artifact {
    Derivation { root: DerivationNode },
    Countermodel { sequent: String, model: ModelJson },
    Stats(Stats),
    Truncation { sequent: String, stages: Vec<Snapshot> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    #[serde(flatten)]
    pub artifact: Artifact,
}

impl Document {
    pub fn new(artifact: Artifact) -> Document {
        Document { schema: SCHEMA.to_string(), artifact }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifacts serialize")
    }

    pub fn from_json(text: &str) -> Result<Document> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(Error::Schema(format!("unsupported schema {:?}", doc.schema)));
        }
        Ok(doc)
    }
}

pub fn derivation_node(d: &Deduction) -> DerivationNode {
    DerivationNode {
        sequent: d.sequent.to_string(),
        rule: d.rule.label().to_string(),
        principal: d.principal.as_ref().map(|f| f.to_string()),
        eigenvariable: d.eigenvariable,
        terms: d.terms.iter().map(|t| t.to_string()).collect(),
        children: d.children.iter().map(derivation_node).collect(),
    }
}

pub fn derivation_document(d: &Deduction) -> Document {
    Document::new(Artifact::Derivation { root: derivation_node(d) })
}

/// Rebuilds a deduction with unmarked sequents.
pub fn deduction_from_json(n: &DerivationNode) -> Result<Deduction> {
    let rule = Rule::from_label(&n.rule).ok_or_else(|| Error::Schema(format!("unknown rule {:?}", n.rule)))?;
    Ok(Deduction {
        sequent: parse_sequent(&n.sequent)?.erase(),
        rule,
        principal: n.principal.as_deref().map(parse_formula).transpose()?,
        eigenvariable: n.eigenvariable,
        terms: n.terms.iter().map(|t| parse_term(t)).collect::<Result<_>>()?,
        children: n.children.iter().map(deduction_from_json).collect::<Result<_>>()?,
    })
}

pub fn model_json(m: &KripkeModel) -> ModelJson {
    ModelJson {
        kind: match m.kind {
            ModelKind::Prop => "prop",
            ModelKind::Predicate => "predicate",
        }
        .to_string(),
        root: m.root,
        worlds: m
            .worlds
            .iter()
            .enumerate()
            .map(|(id, w)| WorldJson { id, atoms: w.atoms.iter().map(|a| a.to_string()).collect(), vars: w.vars.iter().copied().collect() })
            .collect(),
        edges: m.edges.iter().map(|&(a, b)| [a, b]).collect(),
        functions: m.functions.clone(),
    }
}

pub fn model_from_json(j: &ModelJson) -> Result<KripkeModel> {
    let kind = match j.kind.as_str() {
        "prop" => ModelKind::Prop,
        "predicate" => ModelKind::Predicate,
        k => return Err(Error::Schema(format!("unknown model kind {k:?}"))),
    };
    let mut worlds = Vec::new();
    for (i, w) in j.worlds.iter().enumerate() {
        if w.id != i {
            return Err(Error::Schema(format!("world {i} has id {}", w.id)));
        }
        let atoms = w.atoms.iter().map(|a| parse_formula(a)).collect::<Result<BTreeSet<_>>>()?;
        worlds.push(World { atoms, vars: w.vars.iter().copied().collect() });
    }
    let n = worlds.len();
    if j.root >= n || j.edges.iter().any(|e| e[0] >= n || e[1] >= n) {
        return Err(Error::Schema("world index out of range".into()));
    }
    let mut m = KripkeModel::new(kind, worlds, j.edges.iter().map(|e| (e[0], e[1])).collect(), j.root);
    m.functions = j.functions.clone();
    Ok(m)
}

pub fn countermodel_document(m: &KripkeModel, s0: &Sequent) -> Document {
    Document::new(Artifact::Countermodel { sequent: s0.erase().to_string(), model: model_json(m) })
}

/// Snapshots of a staged tree at each stage up to the current one. A node
/// belongs to stage `k` when `lh ≤ k`, and counts as expanded there when it
/// was expanded before stage `k`.
pub fn truncation_document(tree: &StagedTree) -> Document {
    let stages = (0..=tree.stage)
        .map(|k| Snapshot {
            stage: k,
            nodes: tree
                .nodes
                .iter()
                .filter(|n| n.lh() <= k)
                .map(|n| SnapshotNode {
                    addr: n.addr.clone(),
                    sequent: n.sequent.display_marked(),
                    gate: n.gate.symbol().to_string(),
                    expanded: n.expanded && n.lh() < k,
                })
                .collect(),
        })
        .collect();
    Document::new(Artifact::Truncation { sequent: tree.root().sequent.erase().to_string(), stages })
}

/// Outcome of re-checking a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Valid,
    Invalid(String),
    /// Stats and truncation dumps claim nothing checkable.
    NotCheckable,
}

/// Re-verifies a derivation with the local rule checker, or a countermodel
/// by validating it and forcing its sequent false at the root.
pub fn check_document(doc: &Document) -> Result<CheckOutcome> {
    match &doc.artifact {
        Artifact::Derivation { root } => {
            let d = deduction_from_json(root)?;
            Ok(match rules::check_derivation(&d) {
                Ok(()) => CheckOutcome::Valid,
                Err(e) => CheckOutcome::Invalid(e.to_string()),
            })
        }
        Artifact::Countermodel { sequent, model } => {
            let s = parse_sequent(sequent)?;
            let m = model_from_json(model)?;
            if let Err(e) = m.validate() {
                return Ok(CheckOutcome::Invalid(e.to_string()));
            }
            Ok(match kripke::falsifies(&m, m.root, &s) {
                Ok(true) => CheckOutcome::Valid,
                Ok(false) => CheckOutcome::Invalid("the model does not falsify the sequent at its root".into()),
                Err(e) => CheckOutcome::Invalid(e.to_string()),
            })
        }
        _ => Ok(CheckOutcome::NotCheckable),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn derivation_dot(d: &Deduction) -> String {
    fn go(d: &Deduction, out: &mut String, next: &mut usize) -> usize {
        let id = *next;
        *next += 1;
        let _ = writeln!(out, "  n{id} [label=\"{}\\n{}\"];", dot_escape(&d.sequent.to_string()), dot_escape(d.rule.label()));
        for c in &d.children {
            let k = go(c, out, next);
            let _ = writeln!(out, "  n{id} -> n{k};");
        }
        id
    }
    let mut out = String::from("digraph derivation {\n  rankdir=BT;\n  node [shape=box];\n");
    go(d, &mut out, &mut 0);
    out.push_str("}\n");
    out
}

pub fn model_dot(m: &KripkeModel) -> String {
    let mut out = String::from("digraph model {\n  rankdir=BT;\n");
    for (i, w) in m.worlds.iter().enumerate() {
        let atoms: Vec<String> = w.atoms.iter().map(|a| a.to_string()).collect();
        let shape = if i == m.root { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  w{i} [shape={shape}, label=\"w{i}\\n{}\"];", dot_escape(&atoms.join(", ")));
    }
    for &(a, b) in &m.edges {
        let _ = writeln!(out, "  w{a} -> w{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{decide, SearchMode, Verdict};

    fn verdict(t: &str) -> (Sequent, Verdict) {
        let s = parse_sequent(t).unwrap();
        let v = decide(&s, SearchMode::Prop).unwrap();
        (s, v)
    }

    #[test]
    fn derivation_round_trip() {
        let (_, v) = verdict("|- ((p -> q) -> p) -> ~~p");
        let Verdict::Derivable(d) = v else { panic!() };
        let doc = Document::from_json(&derivation_document(&d).to_json()).unwrap();
        assert_eq!(check_document(&doc).unwrap(), CheckOutcome::Valid);
        let Artifact::Derivation { root } = &doc.artifact else { panic!() };
        assert_eq!(deduction_from_json(root).unwrap(), d);
    }

    #[test]
    fn countermodel_round_trip() {
        let (s, v) = verdict("|- p | ~p");
        let Verdict::Underivable(c) = v else { panic!() };
        let text = countermodel_document(&c.model, &s).to_json();
        assert!(text.contains("\"schema\": \"seqcalc/v1\""));
        assert_eq!(check_document(&Document::from_json(&text).unwrap()).unwrap(), CheckOutcome::Valid);
    }

    #[test]
    fn tampered_artifacts_fail() {
        let (_, v) = verdict("|- p -> p");
        let Verdict::Derivable(d) = v else { panic!() };
        let mut doc = derivation_document(&d);
        let Artifact::Derivation { root } = &mut doc.artifact else { panic!() };
        let mut n = root;
        while !n.children.is_empty() {
            n = &mut n.children[0];
        }
        n.sequent = "p |- q".into();
        assert!(matches!(check_document(&doc).unwrap(), CheckOutcome::Invalid(_)));

        let (s, _) = verdict("|- p");
        let m = KripkeModel::prop(vec![vec!["p"]], vec![]);
        assert!(matches!(check_document(&countermodel_document(&m, &s)).unwrap(), CheckOutcome::Invalid(_)));
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = r#"{"schema": "seqcalc/v0", "kind": "stats", "mode": "prop", "verdict": "unknown", "sequent_size": 1}"#;
        assert!(matches!(Document::from_json(text), Err(Error::Schema(_))));
        assert!(matches!(Document::from_json("{}"), Err(Error::Schema(_))));
    }

    #[test]
    fn dot_output() {
        let (s, v) = verdict("|- p | ~p");
        let Verdict::Underivable(c) = v else { panic!() };
        let dot = model_dot(&c.model);
        assert!(dot.starts_with("digraph model"));
        assert_eq!(dot.matches("->").count(), c.model.edges.len());
        let (_, v) = verdict("p |- p");
        let Verdict::Derivable(d) = v else { panic!() };
        assert!(derivation_dot(&d).contains("axiom-T"));
        let _ = s;
    }
}
