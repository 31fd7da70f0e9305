//! N-Triples archive of patterns and their run.

use super::json::PatternFile;
use super::DiscoveryRun;
use crate::base::PatternStore;
use crate::rdf::{write_term, KnowledgeGraph, Literal, Resource, RDF_TYPE, XSD};

pub const VOCAB: &str = "urn:gpminer:vocab:";

struct Writer(String);

impl Writer {
    fn triple(&mut self, s: &str, p: &str, o: &Resource) {
        self.0.push_str(&format!("<{s}> <{VOCAB}{p}> "));
        write_term(&mut self.0, o);
        self.0.push_str(" .\n");
    }

    fn typed(&mut self, s: &str, class: &str) {
        self.0.push_str(&format!("<{s}> <{RDF_TYPE}> <{VOCAB}{class}> .\n"));
    }
}

fn int(n: usize) -> Resource {
    Resource::Literal(Literal::typed(n.to_string(), format!("{XSD}integer")))
}

fn text(s: &str) -> Resource {
    Resource::Literal(Literal::plain(s))
}

/// Patterns as resources under [`VOCAB`], followed by the run and a closing
/// `complete` triple. A file without that last triple was cut short.
///
/// Each pattern gets nine triples (type, canonical form, query, support,
/// depth, length, width, generation, run) plus one `parent` link when it has
/// a parent. The run gets type, id, tool version, hyperparameters, last
/// complete depth, status, and one triple per input digest.
pub fn serialize_rdf(store: &PatternStore, graph: &KnowledgeGraph, run: &DiscoveryRun) -> String {
    let file = PatternFile::from_store(store, graph, run.clone());
    let run_iri = format!("urn:gpminer:run:{}", run.run_id);
    let mut w = Writer(String::new());
    for p in &file.patterns {
        let iri = format!("urn:gpminer:pattern:{}", p.id);
        w.typed(&iri, "Pattern");
        w.triple(&iri, "canonical", &text(&p.canonical));
        w.triple(&iri, "sparql", &text(&p.sparql));
        w.triple(&iri, "support", &int(p.support));
        w.triple(&iri, "depth", &int(p.depth));
        w.triple(&iri, "length", &int(p.length));
        w.triple(&iri, "width", &int(p.width));
        w.triple(&iri, "generation", &int(p.generation));
        w.triple(&iri, "run", &Resource::iri(&run_iri));
        if let Some(parent) = &p.parent_id {
            w.triple(&iri, "parent", &Resource::iri(format!("urn:gpminer:pattern:{parent}")));
        }
    }
    let hyper = serde_json::to_string(&run.hyperparameters).expect("hyperparameters serialize");
    let status = serde_json::to_value(run.status).expect("status serializes");
    w.typed(&run_iri, "Run");
    w.triple(&run_iri, "runId", &text(&run.run_id));
    w.triple(&run_iri, "toolVersion", &text(&run.tool_version));
    w.triple(&run_iri, "hyperparameters", &text(&hyper));
    w.triple(&run_iri, "lastCompleteDepth", &int(run.last_complete_depth));
    w.triple(&run_iri, "status", &text(status.as_str().unwrap_or_default()));
    for input in &run.inputs {
        w.triple(&run_iri, "inputDigest", &text(&format!("{} sha256:{}", input.name, input.sha256)));
    }
    w.triple(&run_iri, "complete", &Resource::Literal(Literal::typed("true", format!("{XSD}boolean"))));
    w.0
}
