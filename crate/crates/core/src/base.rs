//! Single-clause base patterns and the generation-indexed pattern store.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::domain::Domain;
use crate::pattern::{
    canonical_string, metrics, tail_sort_key, Component, GraphPattern, Normalization, PatternMetrics, RangeModel,
    TailKey, ValueKind, VarKind,
};
use crate::ranges::{cluster_and_generalize, fit_gmm, temporal, RangeConfig, TemporalKind};
use crate::rdf::{DatatypeClass, KnowledgeGraph, Literal, ResourceId, RDF_LANG_STRING, XSD_STRING};

#[derive(Clone, Debug, PartialEq)]
pub enum BaseTail {
    Const(ResourceId),
    /// Entities of a type.
    Object(ResourceId),
    /// Literals of a datatype.
    Data(ResourceId),
    Range(Arc<RangeModel>),
}

impl BaseTail {
    pub fn is_variable(&self) -> bool {
        !matches!(self, BaseTail::Const(_))
    }

    pub fn is_object(&self) -> bool {
        matches!(self, BaseTail::Object(_))
    }

    pub fn var_kind(&self) -> Option<VarKind> {
        match self {
            BaseTail::Const(_) => None,
            BaseTail::Object(t) => Some(VarKind::Object(*t)),
            BaseTail::Data(t) => Some(VarKind::Data(*t)),
            BaseTail::Range(m) => Some(VarKind::Range(m.clone())),
        }
    }
}

/// A clause `p(?x, tail)` with `?x` of `head_type` and enough support.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseClause {
    pub head_type: ResourceId,
    pub predicate: ResourceId,
    pub tail: BaseTail,
    /// Entities of `head_type` with a matching assertion.
    pub head_domain: Domain,
    /// Tail bindings reachable from the head domain; `{r}` for a constant `r`.
    pub tail_domain: Domain,
    pub sort_key: (String, TailKey),
}

impl BaseClause {
    pub fn new(
        graph: &KnowledgeGraph,
        head_type: ResourceId,
        predicate: ResourceId,
        tail: BaseTail,
        head_domain: Domain,
        tail_domain: Domain,
    ) -> Self {
        let dict = graph.dictionary();
        let key = match &tail {
            BaseTail::Const(r) => tail_sort_key(dict, Some(*r), None),
            other => tail_sort_key(dict, None, other.var_kind().as_ref()),
        };
        BaseClause {
            head_type,
            predicate,
            tail,
            head_domain,
            tail_domain,
            sort_key: (dict.decode(predicate).to_string(), key),
        }
    }

    pub fn support(&self) -> usize {
        self.head_domain.len()
    }

    /// The clause as a one-clause pattern with its domains.
    pub fn to_pattern(&self, graph: &KnowledgeGraph) -> GraphPattern {
        let root = GraphPattern::rooted(self.head_type, graph.members(self.head_type).clone());
        crate::miner::propagate_domain(graph, &root, 0, self)
    }
}

/// A discovered pattern with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct MinedPattern {
    pub pattern: GraphPattern,
    pub canonical: String,
    /// Canonical string of the pattern this one was extended from.
    pub parent: Option<String>,
    pub metrics: PatternMetrics,
    /// Same support as its generation parent; such a pattern must shrink
    /// the domain in its next extension.
    pub graced: bool,
}

/// Patterns of one generation, per root type, sorted by canonical string.
pub type Generation = BTreeMap<ResourceId, Vec<MinedPattern>>;

/// Counters from value-range induction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaseDiagnostics {
    pub populations: usize,
    pub populations_too_small: usize,
    pub unparseable_literals: usize,
    pub range_patterns: usize,
}

/// Ω: base clauses per type and all discovered generations.
#[derive(Clone, Debug, Default)]
pub struct PatternStore {
    /// Base clauses per head type, ordered by predicate and tail.
    pub base: BTreeMap<ResourceId, Vec<BaseClause>>,
    /// `generations[0]` holds the base patterns.
    pub generations: Vec<Generation>,
    pub diagnostics: BaseDiagnostics,
}

impl PatternStore {
    pub fn patterns(&self) -> impl Iterator<Item = &MinedPattern> {
        self.generations.iter().flat_map(|g| g.values().flatten())
    }

    pub fn len(&self) -> usize {
        self.generations.iter().map(|g| g.values().map(Vec::len).sum::<usize>()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generation(&self, g: usize) -> impl Iterator<Item = &MinedPattern> {
        self.generations.get(g).into_iter().flat_map(|g| g.values().flatten())
    }

    /// Drops generations above `g`.
    pub fn truncate(&mut self, g: usize) {
        self.generations.truncate(g + 1);
    }
}

/// Computes every base pattern with support at least `min_support`.
///
/// Types with fewer members than `min_support` are skipped. Value ranges are
/// induced per (type, predicate) population when the population holds at
/// least `max(ranges.min_range_sample, min_support)` values.
pub fn compute_base_patterns(
    graph: &KnowledgeGraph,
    min_support: usize,
    ranges: &RangeConfig,
    seed: u64,
) -> PatternStore {
    let min_support = min_support.max(1);
    let types: Vec<ResourceId> = graph
        .types()
        .filter(|&t| graph.members(t).len() >= min_support)
        .collect();
    let per_type: Vec<(ResourceId, Vec<BaseClause>, BaseDiagnostics)> = types
        .par_iter()
        .map(|&t| {
            let mut diag = BaseDiagnostics::default();
            let clauses = base_clauses_for_type(graph, t, min_support, ranges, seed, &mut diag);
            (t, clauses, diag)
        })
        .collect();

    let mut store = PatternStore::default();
    let mut gen0 = Generation::new();
    for (t, clauses, diag) in per_type {
        let population = graph.members(t).len();
        store.diagnostics.populations += diag.populations;
        store.diagnostics.populations_too_small += diag.populations_too_small;
        store.diagnostics.unparseable_literals += diag.unparseable_literals;
        store.diagnostics.range_patterns += diag.range_patterns;
        if clauses.is_empty() {
            continue;
        }
        let mut patterns: Vec<MinedPattern> = clauses
            .iter()
            .map(|c| {
                let pattern = c.to_pattern(graph);
                MinedPattern {
                    graced: pattern.support == population,
                    canonical: canonical_string(&pattern, graph.dictionary()),
                    metrics: metrics(&pattern),
                    pattern,
                    parent: None,
                }
            })
            .collect();
        patterns.sort_by(|a, b| a.canonical.cmp(&b.canonical));
        gen0.insert(t, patterns);
        store.base.insert(t, clauses);
    }
    store.generations.push(gen0);
    store
}

fn base_clauses_for_type(
    graph: &KnowledgeGraph,
    t: ResourceId,
    min_support: usize,
    ranges: &RangeConfig,
    seed: u64,
    diag: &mut BaseDiagnostics,
) -> Vec<BaseClause> {
    let mut out = Vec::new();
    for &p in graph.predicates() {
        let assertions = graph.by_predicate_and_type(p, t);
        if assertions.is_empty() {
            continue;
        }
        let mut by_const: BTreeMap<ResourceId, Vec<ResourceId>> = BTreeMap::new();
        let mut by_type: BTreeMap<ResourceId, (Vec<ResourceId>, Vec<ResourceId>)> = BTreeMap::new();
        let mut by_datatype: BTreeMap<ResourceId, (Vec<ResourceId>, Vec<ResourceId>)> = BTreeMap::new();
        for a in assertions {
            by_const.entry(a.tail).or_default().push(a.head);
            for &tt in graph.types_of(a.tail) {
                let e = by_type.entry(tt).or_default();
                e.0.push(a.head);
                e.1.push(a.tail);
            }
            if let Some(dt) = graph.datatype_of(a.tail) {
                let e = by_datatype.entry(dt).or_default();
                e.0.push(a.head);
                e.1.push(a.tail);
            }
        }
        for (r, heads) in by_const {
            let heads = Domain::from_unsorted(heads);
            if heads.len() >= min_support {
                out.push(BaseClause::new(graph, t, p, BaseTail::Const(r), heads, Domain::from_sorted(vec![r])));
            }
        }
        for (tt, (heads, tails)) in by_type {
            let heads = Domain::from_unsorted(heads);
            if heads.len() >= min_support {
                let tails = Domain::from_unsorted(tails);
                out.push(BaseClause::new(graph, t, p, BaseTail::Object(tt), heads, tails));
            }
        }
        for (dt, (heads, tails)) in by_datatype {
            let heads = Domain::from_unsorted(heads);
            if heads.len() >= min_support {
                let tails = Domain::from_unsorted(tails);
                out.push(BaseClause::new(graph, t, p, BaseTail::Data(dt), heads, tails));
            }
        }
        out.extend(range_clauses(graph, t, p, min_support, ranges, seed, diag));
    }
    out.sort_by(|a, b| a.sort_key.cmp(&b.sort_key));
    out.dedup_by(|a, b| a.sort_key == b.sort_key);
    out
}

/// Population key: numbers share one population, times split by datatype.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum PopulationKind {
    Numeric,
    Temporal(String),
    Textual,
}

struct Population {
    /// (head, literal, value) per assertion.
    numeric: Vec<(ResourceId, ResourceId, f64)>,
    text: Vec<(ResourceId, ResourceId)>,
}

fn range_clauses(
    graph: &KnowledgeGraph,
    t: ResourceId,
    p: ResourceId,
    min_support: usize,
    ranges: &RangeConfig,
    seed: u64,
    diag: &mut BaseDiagnostics,
) -> Vec<BaseClause> {
    let mut pops: BTreeMap<PopulationKind, Population> = BTreeMap::new();
    for a in graph.by_predicate_and_type(p, t) {
        let Some(lit) = graph.resource(a.tail).as_literal() else {
            continue;
        };
        let Some(kind) = population_kind(lit, ranges) else {
            continue;
        };
        let pop = pops.entry(kind.clone()).or_insert_with(|| Population {
            numeric: Vec::new(),
            text: Vec::new(),
        });
        match kind {
            PopulationKind::Textual => pop.text.push((a.head, a.tail)),
            PopulationKind::Numeric => match lit.lexical.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => pop.numeric.push((a.head, a.tail, v)),
                _ => diag.unparseable_literals += 1,
            },
            PopulationKind::Temporal(_) => match temporal::to_unix_seconds(lit) {
                Ok(v) => pop.numeric.push((a.head, a.tail, v)),
                Err(_) => diag.unparseable_literals += 1,
            },
        }
    }

    let min_sample = ranges.min_range_sample.max(min_support);
    let dict = graph.dictionary();
    let mut out = Vec::new();
    for (kind, pop) in pops {
        let n = pop.numeric.len() + pop.text.len();
        if n < min_sample {
            diag.populations_too_small += 1;
            continue;
        }
        diag.populations += 1;
        let key = format!("{}|{}|{:?}", dict.decode(t), dict.decode(p), kind);
        let pop_seed = population_seed(seed, &key);
        let models: Vec<RangeModel> = match &kind {
            PopulationKind::Textual => {
                let mut values: Vec<String> = pop
                    .text
                    .iter()
                    .map(|&(_, l)| graph.resource(l).lexical().to_string())
                    .collect();
                values.sort();
                cluster_and_generalize(&values, ranges.text_coverage)
                    .into_iter()
                    .map(|c| RangeModel::Regex(c.generalized))
                    .collect()
            }
            PopulationKind::Numeric | PopulationKind::Temporal(_) => {
                let values: Vec<f64> = pop.numeric.iter().map(|&(_, _, v)| v).collect();
                let value_kind = match &kind {
                    PopulationKind::Temporal(dt) => ValueKind::Temporal {
                        kind: TemporalKind::from_datatype(dt).expect("temporal datatype"),
                        datatype: dt.clone(),
                    },
                    _ => ValueKind::Numeric,
                };
                gaussian_models(&values, value_kind, ranges, pop_seed)
            }
        };

        let candidates: Vec<(ResourceId, ResourceId)> = match kind {
            PopulationKind::Textual => pop.text.clone(),
            _ => pop.numeric.iter().map(|&(h, l, _)| (h, l)).collect(),
        };
        let mut seen = BTreeSet::new();
        for model in models {
            if !seen.insert(model.key()) {
                continue;
            }
            let mut accepted: HashMap<ResourceId, bool> = HashMap::new();
            let mut heads = Vec::new();
            let mut tails = Vec::new();
            for &(h, l) in &candidates {
                let ok = *accepted.entry(l).or_insert_with(|| {
                    let lit: &Literal = graph.resource(l).as_literal().expect("literal");
                    model.accepts(lit).unwrap_or(false)
                });
                if ok {
                    heads.push(h);
                    tails.push(l);
                }
            }
            let heads = Domain::from_unsorted(heads);
            if heads.len() >= min_support {
                diag.range_patterns += 1;
                let tails = Domain::from_unsorted(tails);
                out.push(BaseClause::new(graph, t, p, BaseTail::Range(Arc::new(model)), heads, tails));
            }
        }
    }
    out
}

fn population_kind(lit: &Literal, ranges: &RangeConfig) -> Option<PopulationKind> {
    match lit.class() {
        DatatypeClass::Numeric if ranges.numeric => Some(PopulationKind::Numeric),
        DatatypeClass::Temporal if ranges.temporal => Some(PopulationKind::Temporal(lit.datatype.clone())),
        DatatypeClass::Textual
            if ranges.textual && (lit.datatype == XSD_STRING || lit.datatype == RDF_LANG_STRING) =>
        {
            Some(PopulationKind::Textual)
        }
        _ => None,
    }
}

/// One single-component range per mode of the best mixture.
fn gaussian_models(values: &[f64], kind: ValueKind, ranges: &RangeConfig, seed: u64) -> Vec<RangeModel> {
    let Some(fit) = fit_gmm(values, ranges.modes_max, ranges.restarts, seed) else {
        return Vec::new();
    };
    let n = values.len() as f64;
    let shift = values.iter().sum::<f64>() / n;
    let scale = (values.iter().map(|v| (v - shift).powi(2)).sum::<f64>() / n).sqrt();
    let normalization = Normalization {
        shift,
        scale: if scale > 0.0 { scale } else { 1.0 },
    };
    fit.components
        .iter()
        .filter(|c| c.weight > 0.0)
        .map(|c| RangeModel::Gaussian {
            components: vec![Component {
                weight: 1.0,
                mean: c.mean,
                variance: c.variance,
            }],
            normalization,
            kind: kind.clone(),
        })
        .collect()
}

/// Seed for one population, independent of scheduling.
pub fn population_seed(seed: u64, key: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Domains of a single-clause pattern computed from scratch.
pub fn base_domain(pattern: &GraphPattern, graph: &KnowledgeGraph) -> Vec<Domain> {
    let mut p = pattern.clone();
    for v in 0..p.vars.len() {
        p.domains[v] = crate::miner::initial_domain(graph, &p.vars[v].kind);
    }
    crate::miner::reduce(graph, &mut p);
    p.domains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Term;
    use crate::rdf::{build_graph, parse_ntriples, ParseMode, XSD};

    fn graph(src: &str) -> KnowledgeGraph {
        let parsed = parse_ntriples(src.as_bytes(), ParseMode::Strict).unwrap();
        build_graph(&parsed.triples, "http://ex/has_type").unwrap()
    }

    fn certificate() -> KnowledgeGraph {
        graph(
            "<http://ex/cert> <http://ex/has_type> <http://ex/Death_Certificate> .\n\
             <http://ex/jane> <http://ex/has_type> <http://ex/Person> .\n\
             <http://ex/cert> <http://ex/has_subject> <http://ex/jane> .\n\
             <http://ex/cert> <http://ex/at_age> \"23.6\"^^<http://www.w3.org/2001/XMLSchema#float> .\n\
             <http://ex/jane> <http://ex/has_gender> <http://ex/Female> .\n\
             <http://ex/jane> <http://ex/has_occupation> <http://ex/H.0-2> .\n\
             <http://ex/jane> <http://ex/has_name> \"Jane\" .\n\
             <http://ex/cert> <http://ex/registered_in> <http://ex/municipality> .\n",
        )
    }

    fn keys(store: &PatternStore) -> Vec<String> {
        store.patterns().map(|p| p.canonical.clone()).collect()
    }

    #[test]
    fn certificate_base_patterns() {
        let g = certificate();
        let store = compute_base_patterns(&g, 1, &RangeConfig::default(), 0);
        let k = keys(&store);
        for expected in [
            "?v0:<http://ex/Person> | <http://ex/has_gender>(?v0,<http://ex/Female>)",
            "?v0:<http://ex/Death_Certificate> | <http://ex/at_age>(?v0,?v1^^<http://www.w3.org/2001/XMLSchema#float>)",
            "?v0:<http://ex/Death_Certificate> | <http://ex/has_subject>(?v0,?v1:<http://ex/Person>)",
        ] {
            assert!(k.iter().any(|s| s == expected), "missing {expected}\n{k:#?}");
        }
        let person = g.dictionary().lookup_iri("http://ex/Person").unwrap();
        let jane = g.dictionary().lookup_iri("http://ex/jane").unwrap();
        let gender = store.base[&person]
            .iter()
            .find(|c| g.resource(c.predicate).lexical() == "http://ex/has_gender")
            .unwrap();
        assert_eq!(gender.head_domain.as_slice(), &[jane]);
        // Samples of one value are below the default minimum sample size.
        assert_eq!(store.diagnostics.range_patterns, 0);
    }

    #[test]
    fn degenerate_range_with_small_sample_setting() {
        let g = certificate();
        let ranges = RangeConfig {
            min_range_sample: 1,
            ..RangeConfig::default()
        };
        let store = compute_base_patterns(&g, 1, &ranges, 0);
        let dc = g.dictionary().lookup_iri("http://ex/Death_Certificate").unwrap();
        let range = store.base[&dc]
            .iter()
            .find(|c| matches!(c.tail, BaseTail::Range(_)))
            .expect("range clause");
        let BaseTail::Range(model) = &range.tail else { unreachable!() };
        assert_eq!(model.bounds()[0].lo_lexical, "23.60");
        assert_eq!(range.support(), 1);
        // The name literal gets a regex range on Person.
        let person = g.dictionary().lookup_iri("http://ex/Person").unwrap();
        assert!(store.base[&person].iter().any(|c| matches!(&c.tail, BaseTail::Range(m) if m.key() == "R/[A-Z][a-z]{3}/")));
    }

    #[test]
    fn support_above_entity_count_gives_empty_store() {
        let store = compute_base_patterns(&certificate(), 3, &RangeConfig::default(), 0);
        assert!(store.is_empty());
        assert!(store.base.is_empty());
    }

    #[test]
    fn base_domain_matches_stored_domains() {
        let g = certificate();
        let store = compute_base_patterns(&g, 1, &RangeConfig::default(), 0);
        for p in store.patterns() {
            assert_eq!(base_domain(&p.pattern, &g), p.pattern.domains, "{}", p.canonical);
        }
    }

    #[test]
    fn clause_never_seen_with_type_has_empty_domain() {
        let g = certificate();
        let person = g.dictionary().lookup_iri("http://ex/Person").unwrap();
        let at_age = g.dictionary().lookup_iri("http://ex/at_age").unwrap();
        let float = g.dictionary().lookup_iri(&format!("{XSD}float")).unwrap();
        let mut p = GraphPattern::rooted(person, Domain::empty());
        let v = p.add_var(VarKind::Data(float), Domain::empty());
        p.add_clause(crate::pattern::Clause { predicate: at_age, head: 0, tail: Term::Var(v) });
        let d = base_domain(&p, &g);
        assert!(d.iter().all(Domain::is_empty));
    }

    #[test]
    fn population_seed_depends_on_key() {
        assert_eq!(population_seed(1, "a"), population_seed(1, "a"));
        assert_ne!(population_seed(1, "a"), population_seed(1, "b"));
        assert_ne!(population_seed(1, "a"), population_seed(2, "a"));
    }
}
