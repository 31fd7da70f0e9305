//! Fixtures, a random graph generator, and a brute-force pattern enumerator.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use gpminer::base::{compute_base_patterns, BaseTail, PatternStore};
use gpminer::miner::{discover, MinerConfig, NoCheckpoint, Pruning};
use gpminer::pattern::{canonical_string, membership, tail_sort_key, Clause, GraphPattern, RangeModel, Term, VarKind};
use gpminer::ranges::RangeConfig;
use gpminer::rdf::{build_graph, parse_ntriples, KnowledgeGraph, ParseMode, Resource, ResourceId, RDF_TYPE};
use gpminer::Domain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EX: &str = "http://example.org/";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

pub fn load(src: &str, type_predicate: &str) -> KnowledgeGraph {
    let parsed = parse_ntriples(src.as_bytes(), ParseMode::Strict).expect("fixture parses");
    build_graph(&parsed.triples, type_predicate).expect("fixture builds")
}

/// The civil-registry example: a death certificate about a woman.
pub fn certificate_source() -> String {
    format!(
        "<{EX}cert1> <{EX}has_type> <{EX}Death_Certificate> .\n\
         <{EX}jane> <{EX}has_type> <{EX}Person> .\n\
         <{EX}cert1> <{EX}has_subject> <{EX}jane> .\n\
         <{EX}cert1> <{EX}at_age> \"24.5\"^^<{XSD}float> .\n\
         <{EX}jane> <{EX}has_gender> <{EX}Female> .\n\
         <{EX}jane> <{EX}has_occupation> <{EX}H.0-2> .\n\
         <{EX}jane> <{EX}has_name> \"jane doe\" .\n\
         <{EX}cert1> <{EX}registered_in> <{EX}Amsterdam> .\n"
    )
}

pub fn certificate() -> KnowledgeGraph {
    load(&certificate_source(), &format!("{EX}has_type"))
}

/// Small typed graph with entity links, shared constants, numbers, and strings.
pub fn random_source(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = rng.random_range(2..=4usize);
    let n = rng.random_range(10..=18usize);
    let preds = ["p0", "p1", "p2", "p3"];
    let words = ["ab", "abc", "abd", "xy z", "q"];
    let mut out = String::new();
    let mut count = 0;
    let mut push = |out: &mut String, line: String| {
        out.push_str(&line);
        count += 1;
    };
    for e in 0..n {
        let t = rng.random_range(0..types);
        push(&mut out, format!("<{EX}e{e}> <{RDF_TYPE}> <{EX}T{t}> .\n"));
        if rng.random::<f64>() < 0.1 {
            let t2 = (t + 1) % types;
            push(&mut out, format!("<{EX}e{e}> <{RDF_TYPE}> <{EX}T{t2}> .\n"));
        }
    }
    for e in 0..n {
        let edges = rng.random_range(2..=4usize);
        for _ in 0..edges {
            let p = preds[rng.random_range(0..preds.len())];
            let roll: f64 = rng.random();
            let tail = if roll < 0.4 {
                format!("<{EX}e{}>", rng.random_range(0..n))
            } else if roll < 0.65 {
                format!("<{EX}k{}>", rng.random_range(0..3))
            } else if roll < 0.8 {
                format!("\"{}\"^^<{XSD}integer>", rng.random_range(1..=4))
            } else {
                format!("\"{}\"", words[rng.random_range(0..words.len())])
            };
            push(&mut out, format!("<{EX}e{e}> <{EX}{p}> {tail} .\n"));
        }
        if rng.random::<f64>() < 0.5 {
            let centre = if rng.random::<bool>() { 10.0 } else { 40.0 };
            let v: f64 = centre + rng.random_range(-3.0..3.0);
            push(&mut out, format!("<{EX}e{e}> <{EX}score> \"{v:.1}\"^^<{XSD}decimal> .\n"));
        }
    }
    assert!(count <= 200, "{count} assertions");
    out
}

pub fn random_graph(seed: u64) -> KnowledgeGraph {
    load(&random_source(seed), RDF_TYPE)
}

pub fn test_ranges() -> RangeConfig {
    RangeConfig {
        modes_max: 2,
        restarts: 2,
        min_range_sample: 4,
        ..RangeConfig::default()
    }
}

pub fn config(min_support: usize, max_depth: usize) -> MinerConfig {
    MinerConfig {
        min_support,
        max_depth,
        max_length: 4,
        max_width: 3,
        require_reduction: true,
        pruning: Pruning::Full,
        workers: 0,
    }
}

pub fn mine(graph: &KnowledgeGraph, cfg: &MinerConfig, ranges: &RangeConfig, seed: u64) -> PatternStore {
    let mut store = compute_base_patterns(graph, cfg.min_support, ranges, seed);
    discover(graph, &mut store, cfg, &AtomicBool::new(false), &mut NoCheckpoint).expect("mining runs");
    store
}

pub fn summary(store: &PatternStore) -> BTreeSet<(String, usize)> {
    store
        .patterns()
        .map(|p| (p.canonical.clone(), p.pattern.support))
        .collect()
}

// ---------------------------------------------------------------------------
// Brute-force enumerator.

#[derive(Clone, Debug)]
enum Tail {
    Const(ResourceId),
    Obj(ResourceId),
    Data(ResourceId),
    Range(Arc<RangeModel>),
}

#[derive(Clone, Debug)]
struct Letter {
    pred: ResourceId,
    tail: Tail,
}

#[derive(Clone, Debug)]
struct OClause {
    head: usize,
    letter: usize,
    /// Object variable introduced by this clause.
    tail_var: Option<usize>,
    layer: usize,
}

#[derive(Clone, Debug)]
struct OPattern {
    /// (type, depth) of each object variable; 0 is the root.
    vars: Vec<(ResourceId, usize)>,
    clauses: Vec<OClause>,
    layers: usize,
}

pub struct Oracle<'g> {
    graph: &'g KnowledgeGraph,
    cfg: MinerConfig,
    out: HashMap<(ResourceId, ResourceId), Vec<ResourceId>>,
    types: HashMap<ResourceId, BTreeSet<ResourceId>>,
    members: BTreeMap<ResourceId, Vec<ResourceId>>,
    letters: Vec<Letter>,
    alphabet: BTreeMap<ResourceId, Vec<usize>>,
}

impl<'g> Oracle<'g> {
    /// `store` only lends its fitted range models.
    pub fn new(graph: &'g KnowledgeGraph, store: &PatternStore, cfg: &MinerConfig) -> Self {
        let dict = graph.dictionary();
        let tp = graph.type_predicate();
        let mut out: HashMap<(ResourceId, ResourceId), Vec<ResourceId>> = HashMap::new();
        let mut types: HashMap<ResourceId, BTreeSet<ResourceId>> = HashMap::new();
        for a in graph.assertions() {
            out.entry((a.predicate, a.head)).or_default().push(a.tail);
            if a.predicate == tp && dict.decode(a.tail).is_entity() {
                types.entry(a.head).or_default().insert(a.tail);
            }
        }
        let mut members: BTreeMap<ResourceId, Vec<ResourceId>> = BTreeMap::new();
        for (&e, ts) in &types {
            for &t in ts {
                members.entry(t).or_default().push(e);
            }
        }
        for m in members.values_mut() {
            m.sort();
        }
        let mut o = Oracle {
            graph,
            cfg: cfg.clone(),
            out,
            types,
            members,
            letters: Vec::new(),
            alphabet: BTreeMap::new(),
        };
        o.build_alphabet(store);
        o
    }

    fn build_alphabet(&mut self, store: &PatternStore) {
        let dict = self.graph.dictionary();
        let min = self.cfg.min_support;
        let types: Vec<ResourceId> = self.members.keys().copied().collect();
        for t in types {
            if self.members[&t].len() < min {
                continue;
            }
            // (predicate, tail key) -> letter and its heads
            let mut found: BTreeMap<(ResourceId, String), (Letter, BTreeSet<ResourceId>)> = BTreeMap::new();
            for &h in &self.members[&t] {
                for a in self.graph.assertions().iter().filter(|a| a.head == h) {
                    let mut add = |tail: Tail, key: String| {
                        found
                            .entry((a.predicate, key))
                            .or_insert_with(|| (Letter { pred: a.predicate, tail }, BTreeSet::new()))
                            .1
                            .insert(h);
                    };
                    add(Tail::Const(a.tail), format!("c{}", a.tail.0));
                    if let Some(ts) = self.types.get(&a.tail) {
                        for &tt in ts {
                            add(Tail::Obj(tt), format!("o{}", tt.0));
                        }
                    }
                    if let Resource::Literal(l) = dict.decode(a.tail) {
                        let dt = dict.lookup_iri(&l.datatype).expect("datatype is encoded");
                        add(Tail::Data(dt), format!("d{}", dt.0));
                    }
                }
            }
            for clause in store.base.get(&t).into_iter().flatten() {
                if let BaseTail::Range(model) = &clause.tail {
                    let heads: BTreeSet<ResourceId> = self.members[&t]
                        .iter()
                        .copied()
                        .filter(|&h| {
                            self.out
                                .get(&(clause.predicate, h))
                                .is_some_and(|ys| ys.iter().any(|&y| membership(model, dict.decode(y))))
                        })
                        .collect();
                    found.insert(
                        (clause.predicate, format!("r{}", model.key())),
                        (Letter { pred: clause.predicate, tail: Tail::Range(model.clone()) }, heads),
                    );
                }
            }
            let mut idx = Vec::new();
            for (_, (letter, heads)) in found {
                if heads.len() >= min {
                    idx.push(self.letters.len());
                    self.letters.push(letter);
                }
            }
            self.alphabet.insert(t, idx);
        }
    }

    fn holds(&self, p: &OPattern, var: usize, x: ResourceId) -> bool {
        let dict = self.graph.dictionary();
        p.clauses.iter().filter(|c| c.head == var).all(|c| {
            let l = &self.letters[c.letter];
            let ys = self.out.get(&(l.pred, x)).map(Vec::as_slice).unwrap_or(&[]);
            ys.iter().any(|&y| match &l.tail {
                Tail::Const(r) => y == *r,
                Tail::Obj(t) => {
                    self.types.get(&y).is_some_and(|ts| ts.contains(t)) && self.holds(p, c.tail_var.unwrap(), y)
                }
                Tail::Data(dt) => match dict.decode(y) {
                    Resource::Literal(lit) => dict.lookup_iri(&lit.datatype) == Some(*dt),
                    _ => false,
                },
                Tail::Range(m) => membership(m, dict.decode(y)),
            })
        })
    }

    fn support(&self, p: &OPattern) -> usize {
        let root = p.vars[0].0;
        self.members[&root].iter().filter(|&&x| self.holds(p, 0, x)).count()
    }

    fn to_graph_pattern(&self, p: &OPattern) -> GraphPattern {
        let mut g = GraphPattern::rooted(p.vars[0].0, Domain::empty());
        let mut ids = vec![0usize; p.vars.len()];
        for c in &p.clauses {
            let l = &self.letters[c.letter];
            let tail = match &l.tail {
                Tail::Const(r) => Term::Const(*r),
                Tail::Obj(t) => {
                    let v = g.add_var(VarKind::Object(*t), Domain::empty());
                    ids[c.tail_var.unwrap()] = v;
                    Term::Var(v)
                }
                Tail::Data(dt) => Term::Var(g.add_var(VarKind::Data(*dt), Domain::empty())),
                Tail::Range(m) => Term::Var(g.add_var(VarKind::Range(m.clone()), Domain::empty())),
            };
            g.add_clause(Clause { predicate: l.pred, head: ids[c.head], tail });
        }
        g
    }

    fn canonical(&self, p: &OPattern) -> String {
        canonical_string(&self.to_graph_pattern(p), self.graph.dictionary())
    }

    fn width_ok(&self, p: &OPattern) -> bool {
        let mut per: HashMap<usize, usize> = HashMap::new();
        for c in &p.clauses {
            *per.entry(c.head).or_default() += 1;
        }
        per.values().all(|&n| n <= self.cfg.max_width)
    }

    fn generation(p: &OPattern) -> usize {
        match p.layers {
            1 if p.clauses.len() == 1 => 0,
            l => l,
        }
    }

    fn without(p: &OPattern, drop: impl Fn(usize, &OClause) -> bool) -> OPattern {
        let clauses: Vec<OClause> = p
            .clauses
            .iter()
            .enumerate()
            .filter(|(i, c)| !drop(*i, c))
            .map(|(_, c)| c.clone())
            .collect();
        let layers = clauses.iter().map(|c| c.layer).max().unwrap_or(0);
        OPattern { vars: p.vars.clone(), clauses, layers }
    }

    /// Every supported pattern within the size limits, generation by generation.
    fn enumerate(&self) -> Vec<OPattern> {
        let mut all = Vec::new();
        let mut frontier: Vec<OPattern> = Vec::new();
        for &t in self.alphabet.keys() {
            let root = OPattern { vars: vec![(t, 0)], clauses: Vec::new(), layers: 0 };
            frontier.push(root);
        }
        let mut layer = 1;
        while !frontier.is_empty() && (layer == 1 || layer <= self.cfg.max_depth) {
            let mut next = Vec::new();
            for p in &frontier {
                let d = layer - 1;
                let mut pairs = Vec::new();
                for (v, &(t, depth)) in p.vars.iter().enumerate() {
                    if depth == d {
                        for &l in self.alphabet.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                            pairs.push((v, l));
                        }
                    }
                }
                self.subsets(p, &pairs, 0, layer, &mut next);
            }
            let keep: Vec<OPattern> = next
                .into_iter()
                .filter(|p| Self::generation(p) <= self.cfg.max_depth)
                .collect();
            all.extend(keep.iter().cloned());
            frontier = keep;
            layer += 1;
        }
        all
    }

    fn subsets(&self, p: &OPattern, pairs: &[(usize, usize)], from: usize, layer: usize, out: &mut Vec<OPattern>) {
        for i in from..pairs.len() {
            let (v, l) = pairs[i];
            let mut q = p.clone();
            let tail_var = match self.letters[l].tail {
                Tail::Obj(t) => {
                    q.vars.push((t, layer));
                    Some(q.vars.len() - 1)
                }
                _ => None,
            };
            q.clauses.push(OClause { head: v, letter: l, tail_var, layer });
            q.layers = layer;
            if q.clauses.len() > self.cfg.max_length || !self.width_ok(&q) {
                continue;
            }
            if self.support(&q) < self.cfg.min_support {
                continue;
            }
            out.push(q.clone());
            self.subsets(&q, pairs, i + 1, layer, out);
        }
    }

    fn is_object(&self, c: &OClause) -> bool {
        matches!(self.letters[c.letter].tail, Tail::Obj(_))
    }

    fn parent_of(p: &OPattern) -> OPattern {
        Self::without(p, |_, c| c.layer == p.layers)
    }

    fn graced(&self, p: &OPattern) -> bool {
        let parent_support = if p.layers == 1 {
            self.members[&p.vars[0].0].len()
        } else {
            self.support(&Self::parent_of(p))
        };
        self.support(p) == parent_support
    }

    fn emitted(&self, p: &OPattern, memo: &mut HashMap<String, bool>) -> bool {
        let key = self.canonical(p);
        if let Some(&b) = memo.get(&key) {
            return b;
        }
        let ok = self.decide(p, memo);
        memo.insert(key, ok);
        ok
    }

    fn decide(&self, p: &OPattern, memo: &mut HashMap<String, bool>) -> bool {
        let supp = self.support(p);
        if supp < self.cfg.min_support || Self::generation(p) > self.cfg.max_depth {
            return false;
        }
        if p.clauses.len() == 1 || !self.cfg.require_reduction {
            return true;
        }
        if p.layers > 1 && !self.emitted(&Self::parent_of(p), memo) {
            return false;
        }
        for (i, c) in p.clauses.iter().enumerate() {
            if c.layer == p.layers && !self.is_object(c) {
                let rest = Self::without(p, |j, _| j == i);
                if supp >= self.support(&rest) {
                    return false;
                }
            }
        }
        let parent_graced = p.layers > 1 && self.graced(&Self::parent_of(p));
        !(self.graced(p) && parent_graced)
    }

    /// Canonical strings and supports of every pattern the miner should emit.
    pub fn expected(&self) -> BTreeSet<(String, usize)> {
        let mut memo = HashMap::new();
        self.enumerate()
            .into_iter()
            .filter(|p| self.emitted(p, &mut memo))
            .map(|p| (self.canonical(&p), self.support(&p)))
            .collect()
    }
}

/// Tail sort key of a letter, for debugging output.
pub fn describe(graph: &KnowledgeGraph, c: Option<ResourceId>, kind: Option<&VarKind>) -> String {
    format!("{:?}", tail_sort_key(graph.dictionary(), c, kind))
}

// ---------------------------------------------------------------------------
// Reference query engine.

/// Distinct bindings of `?v0` when `query` runs over `source`.
pub fn reference_roots(source: &str, query: &str) -> BTreeSet<String> {
    use oxigraph::io::RdfFormat;
    use oxigraph::model::Term as OTerm;
    use oxigraph::sparql::QueryResults;
    use oxigraph::store::Store;

    let store = Store::new().expect("in-memory store");
    store
        .load_from_reader(RdfFormat::NTriples, source.as_bytes())
        .expect("reference store loads");
    let QueryResults::Solutions(solutions) = store.query(query).expect("query parses") else {
        panic!("not a SELECT query");
    };
    solutions
        .map(|s| {
            let s = s.expect("solution");
            match s.get("v0").expect("v0 bound") {
                OTerm::NamedNode(n) => n.as_str().to_string(),
                other => other.to_string(),
            }
        })
        .collect()
}

/// IRIs in a domain.
pub fn iris(graph: &KnowledgeGraph, d: &Domain) -> BTreeSet<String> {
    d.iter().map(|r| graph.resource(r).lexical().to_string()).collect()
}
