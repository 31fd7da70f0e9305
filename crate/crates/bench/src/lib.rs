//! Synthetic inputs shared by the benchmarks.

use gpminer::rdf::{build_graph, parse_ntriples, KnowledgeGraph, ParseMode, RDF_TYPE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EX: &str = "http://example.org/";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// A registry-like graph: certificates about people, with ages, dates,
/// names, and a handful of shared constants. About 8 triples per entity.
pub fn registry_source(entities: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["anna", "jan", "maria", "pieter", "els", "willem", "johanna", "cornelis"];
    let mut out = String::with_capacity(entities * 600);
    for i in 0..entities {
        let person = format!("<{EX}person{i}>");
        let cert = format!("<{EX}cert{i}>");
        out += &format!("{person} <{RDF_TYPE}> <{EX}Person> .\n");
        out += &format!("{cert} <{RDF_TYPE}> <{EX}Certificate> .\n");
        out += &format!("{cert} <{EX}has_subject> {person} .\n");
        let gender = if rng.random::<bool>() { "Female" } else { "Male" };
        out += &format!("{person} <{EX}has_gender> <{EX}{gender}> .\n");
        out += &format!("{person} <{EX}has_occupation> <{EX}occ{}> .\n", rng.random_range(0..6));
        let age: f64 = if rng.random::<f64>() < 0.3 { rng.random_range(0.0..5.0) } else { rng.random_range(20.0..80.0) };
        out += &format!("{cert} <{EX}at_age> \"{age:.1}\"^^<{XSD}decimal> .\n");
        let year = rng.random_range(1811..1975);
        out += &format!("{cert} <{EX}registered> \"{year}\"^^<{XSD}gYear> .\n");
        let (a, b) = (names[rng.random_range(0..names.len())], names[rng.random_range(0..names.len())]);
        out += &format!("{person} <{EX}has_name> \"{a} {b}\" .\n");
        out += &format!("{cert} <{EX}registered_in> <{EX}place{}> .\n", rng.random_range(0..4));
    }
    out
}

pub fn registry(entities: usize, seed: u64) -> KnowledgeGraph {
    let src = registry_source(entities, seed);
    let parsed = parse_ntriples(src.as_bytes(), ParseMode::Strict).expect("generated triples parse");
    build_graph(&parsed.triples, RDF_TYPE).expect("generated graph builds")
}
