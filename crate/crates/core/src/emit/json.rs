//! The JSON pattern file read by the browser.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::provenance::ProvenanceEvent;
use super::{hex, to_sparql, DiscoveryRun};
use crate::base::{MinedPattern, PatternStore};
use crate::error::Result;
use crate::pattern::{canonical_order, GraphPattern, Term, VarKind};
use crate::rdf::{KnowledgeGraph, Resource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Node {
    pub id: String,
    /// `variable`, `entity`, `class`, or `literal`.
    pub kind: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub predicate: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphView {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternRecord {
    pub id: String,
    pub canonical: String,
    pub sparql: String,
    pub support: usize,
    pub depth: usize,
    pub length: usize,
    pub width: usize,
    pub generation: usize,
    pub parent_id: Option<String>,
    pub graph: GraphView,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternFile {
    pub run: DiscoveryRun,
    pub patterns: Vec<PatternRecord>,
    pub provenance: Vec<ProvenanceEvent>,
}

impl PatternFile {
    pub fn from_store(store: &PatternStore, graph: &KnowledgeGraph, run: DiscoveryRun) -> Self {
        PatternFile {
            run,
            patterns: store.patterns().map(|p| record(p, graph)).collect(),
            provenance: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("pattern files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Stable id of a pattern: a prefix of the digest of its canonical string.
pub fn pattern_id(canonical: &str) -> String {
    format!("p{}", &hex(&Sha256::digest(canonical.as_bytes()))[..16])
}

fn record(p: &MinedPattern, graph: &KnowledgeGraph) -> PatternRecord {
    PatternRecord {
        id: pattern_id(&p.canonical),
        canonical: p.canonical.clone(),
        sparql: to_sparql(&p.pattern, graph).to_string(),
        support: p.pattern.support,
        depth: p.metrics.depth,
        length: p.metrics.length,
        width: p.metrics.width,
        generation: p.pattern.generation,
        parent_id: p.parent.as_deref().map(pattern_id),
        graph: graph_view(&p.pattern, graph),
    }
}

/// Node-link form of a pattern, numbered like its canonical string.
pub fn graph_view(p: &GraphPattern, graph: &KnowledgeGraph) -> GraphView {
    let dict = graph.dictionary();
    let order = canonical_order(p, dict);
    let mut view = GraphView::default();
    let mut vars: Vec<usize> = (0..p.vars.len()).filter(|&v| order.names[v] != usize::MAX).collect();
    vars.sort_by_key(|&v| order.names[v]);
    for v in vars {
        let label = match &p.vars[v].kind {
            VarKind::Object(t) => format!("?v{} : {}", order.names[v], dict.decode(*t).lexical()),
            VarKind::Data(dt) => format!("?v{} : {}", order.names[v], dict.decode(*dt).lexical()),
            VarKind::Range(m) => format!("?v{} ~ {}", order.names[v], m.key()),
        };
        view.nodes.push(Node {
            id: format!("v{}", order.names[v]),
            kind: "variable".into(),
            label,
        });
    }
    for (k, &ci) in order.clauses.iter().enumerate() {
        let c = p.clauses[ci];
        let to = match c.tail {
            Term::Var(t) => format!("v{}", order.names[t]),
            Term::Const(r) => {
                let kind = match dict.decode(r) {
                    Resource::Literal(_) => "literal",
                    _ if c.predicate == graph.type_predicate() => "class",
                    _ => "entity",
                };
                let id = format!("c{k}");
                view.nodes.push(Node {
                    id: id.clone(),
                    kind: kind.into(),
                    label: dict.decode(r).lexical().to_string(),
                });
                id
            }
        };
        view.edges.push(Edge {
            from: format!("v{}", order.names[c.head]),
            to,
            predicate: dict.decode(c.predicate).lexical().to_string(),
        });
    }
    view
}

/// The JSON pattern file for a store.
pub fn serialize_json(store: &PatternStore, graph: &KnowledgeGraph, run: DiscoveryRun) -> String {
    PatternFile::from_store(store, graph, run).to_json()
}
