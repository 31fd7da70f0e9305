//! SELECT queries for patterns.

use std::collections::BTreeMap;
use std::fmt;

use crate::pattern::{canonical_order, GraphPattern, RangeModel, Term, ValueKind, VarKind};
use crate::rdf::{write_term, KnowledgeGraph, Resource, ResourceId, RDF, XSD};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparqlQuery {
    /// (prefix, namespace IRI), in declaration order.
    pub prologue: Vec<(String, String)>,
    pub select_vars: Vec<String>,
    /// Triple patterns grouped by subject variable.
    pub where_triples: Vec<Vec<String>>,
    /// One expression per constrained variable.
    pub filters: Vec<String>,
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (prefix, ns) in &self.prologue {
            writeln!(f, "PREFIX {prefix}: <{ns}>")?;
        }
        if !self.prologue.is_empty() {
            writeln!(f)?;
        }
        writeln!(f, "SELECT {}", self.select_vars.join(" "))?;
        writeln!(f, "WHERE {{")?;
        for (i, group) in self.where_triples.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for t in group {
                writeln!(f, "    {t} .")?;
            }
        }
        for filter in &self.filters {
            writeln!(f)?;
            writeln!(f, "    FILTER (")?;
            for line in filter.lines() {
                writeln!(f, "        {line}")?;
            }
            writeln!(f, "    )")?;
        }
        write!(f, "}}")
    }
}

/// Assigns prefixes to namespaces in first-use order.
#[derive(Default)]
struct Prefixes {
    named: BTreeMap<String, String>,
    order: Vec<(String, String)>,
}

impl Prefixes {
    fn fixed() -> Self {
        let mut p = Prefixes::default();
        p.declare("rdf", RDF);
        p.declare("xsd", XSD);
        p
    }

    fn declare(&mut self, prefix: &str, ns: &str) {
        self.named.insert(ns.to_string(), prefix.to_string());
        self.order.push((prefix.to_string(), ns.to_string()));
    }

    fn iri(&mut self, iri: &str) -> String {
        let split = iri.rfind(['#', '/']).map_or(0, |i| i + 1);
        let (ns, local) = iri.split_at(split);
        if ns.is_empty() || !is_local_name(local) {
            return format!("<{iri}>");
        }
        if !self.named.contains_key(ns) {
            let prefix = format!("ns{}", self.order.len() - 1);
            self.declare(&prefix, ns);
        }
        format!("{}:{local}", self.named[ns])
    }

    fn term(&mut self, r: &Resource) -> String {
        match r {
            Resource::Iri(iri) => self.iri(iri),
            other => {
                let mut s = String::new();
                write_term(&mut s, other);
                s
            }
        }
    }

    /// Declarations actually referenced by `body`.
    fn used(&self, body: &str) -> Vec<(String, String)> {
        self.order
            .iter()
            .filter(|(p, _)| body.contains(&format!("{p}:")))
            .cloned()
            .collect()
    }
}

fn is_local_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Renders a pattern as a query whose solutions bind `?v0` to exactly the
/// pattern's matches.
///
/// Variables are numbered as in the canonical string. Object-type variables
/// get a type triple unless a type clause with the same class is already
/// present. Numeric and temporal ranges become inclusive bound filters, one
/// disjunct per component; regex ranges become anchored `REGEX` filters.
pub fn to_sparql(pattern: &GraphPattern, graph: &KnowledgeGraph) -> SparqlQuery {
    let dict = graph.dictionary();
    let order = canonical_order(pattern, dict);
    let name = |v: usize| format!("?v{}", order.names[v]);
    let type_pred = graph.type_predicate();
    let mut prefixes = Prefixes::fixed();

    let mut vars: Vec<usize> = (0..pattern.vars.len()).filter(|&v| order.names[v] != usize::MAX).collect();
    vars.sort_by_key(|&v| order.names[v]);

    let typed = |v: usize, t: ResourceId| {
        pattern
            .clauses
            .iter()
            .any(|c| c.head == v && c.predicate == type_pred && c.tail == Term::Const(t))
    };

    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for &v in &vars {
        if let VarKind::Object(t) = pattern.vars[v].kind {
            if !typed(v, t) {
                let line = format!(
                    "{} {} {}",
                    name(v),
                    prefixes.term(dict.decode(type_pred)),
                    prefixes.term(dict.decode(t))
                );
                groups.entry(order.names[v]).or_default().push(line);
            }
        }
    }
    for &ci in &order.clauses {
        let c = pattern.clauses[ci];
        let tail = match c.tail {
            Term::Const(r) => prefixes.term(dict.decode(r)),
            Term::Var(t) => name(t),
        };
        let line = format!("{} {} {tail}", name(c.head), prefixes.term(dict.decode(c.predicate)));
        groups.entry(order.names[c.head]).or_default().push(line);
    }

    let mut filters = Vec::new();
    for &v in &vars {
        match &pattern.vars[v].kind {
            VarKind::Object(_) => {}
            VarKind::Data(dt) => filters.push(format!("DATATYPE({}) = {}", name(v), prefixes.term(dict.decode(*dt)))),
            VarKind::Range(model) => filters.push(range_filter(&name(v), model, &mut prefixes)),
        }
    }

    let select_vars = vars
        .iter()
        .filter(|&&v| pattern.vars[v].kind.is_object())
        .map(|&v| name(v))
        .collect();
    let where_triples: Vec<Vec<String>> = groups.into_values().collect();
    let body = format!("{where_triples:?}{filters:?}");
    SparqlQuery {
        prologue: prefixes.used(&body),
        select_vars,
        where_triples,
        filters,
    }
}

fn range_filter(var: &str, model: &RangeModel, prefixes: &mut Prefixes) -> String {
    match model {
        RangeModel::Regex(r) => {
            let pattern = format!("^{}$", r.pattern()).replace('\\', "\\\\").replace('"', "\\\"");
            format!("REGEX({var}, \"{pattern}\")")
        }
        RangeModel::Gaussian { kind, .. } => {
            let bounds = model.bounds();
            let mut parts: Vec<String> = bounds
                .iter()
                .map(|b| {
                    let dt = prefixes.iri(&b.datatype);
                    format!(
                        "   {var} >= \"{}\"^^{dt}\n&& {var} <= \"{}\"^^{dt}",
                        b.lo_lexical, b.hi_lexical
                    )
                })
                .collect();
            if parts.len() > 1 {
                parts = parts
                    .into_iter()
                    .map(|p| format!("(\n{}\n)", indent(&p)))
                    .collect();
            }
            let mut text = parts.join("\n||\n");
            if let ValueKind::Temporal { datatype, .. } = kind {
                text = format!("   DATATYPE({var}) = {}\n&& (\n{}\n)", prefixes.iri(datatype), indent(&text));
            }
            text
        }
    }
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::pattern::Clause;
    use crate::rdf::{build_graph, parse_ntriples, ParseMode};
    use std::sync::Arc;

    const EX: &str = "http://example.org/";

    fn graph() -> KnowledgeGraph {
        let src = format!(
            "<{EX}c> <{EX}has_type> <{EX}Death_Certificate> .\n\
             <{EX}j> <{EX}has_type> <{EX}Person> .\n\
             <{EX}c> <{EX}has_subject> <{EX}j> .\n\
             <{EX}c> <{EX}at_age> \"24.5\"^^<{XSD}float> .\n\
             <{EX}j> <{EX}has_gender> <{EX}Female> .\n\
             <{EX}j> <{EX}has_occupation> <{EX}H.0-2> .\n"
        );
        let parsed = parse_ntriples(src.as_bytes(), ParseMode::Strict).unwrap();
        build_graph(&parsed.triples, &format!("{EX}has_type")).unwrap()
    }

    fn age_pattern(g: &KnowledgeGraph) -> GraphPattern {
        let id = |s: &str| g.dictionary().lookup_iri(&format!("{EX}{s}")).unwrap();
        let mut p = GraphPattern::rooted(id("Death_Certificate"), Domain::empty());
        let vi = p.add_var(VarKind::Object(id("Person")), Domain::empty());
        let vk = p.add_var(VarKind::Range(Arc::new(RangeModel::numeric(24.5, 1.32))), Domain::empty());
        for (pred, head, tail) in [
            ("has_gender", vi, Term::Const(id("Female"))),
            ("has_occupation", vi, Term::Const(id("H.0-2"))),
            ("has_subject", 0, Term::Var(vi)),
            ("has_type", 0, Term::Const(id("Death_Certificate"))),
            ("at_age", 0, Term::Var(vk)),
        ] {
            p.add_clause(Clause { predicate: id(pred), head, tail });
        }
        p
    }

    #[test]
    fn age_range_query() {
        let g = graph();
        let q = to_sparql(&age_pattern(&g), &g).to_string();
        assert_eq!(
            q,
            "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n\
             PREFIX ns1: <http://example.org/>\n\
             \n\
             SELECT ?v0 ?v2\n\
             WHERE {\n    \
                 ?v0 ns1:at_age ?v1 .\n    \
                 ?v0 ns1:has_subject ?v2 .\n    \
                 ?v0 ns1:has_type ns1:Death_Certificate .\n\
             \n    \
                 ?v2 ns1:has_type ns1:Person .\n    \
                 ?v2 ns1:has_gender ns1:Female .\n    \
                 ?v2 ns1:has_occupation <http://example.org/H.0-2> .\n\
             \n    \
                 FILTER (\n           \
                        ?v1 >= \"23.35\"^^xsd:decimal\n        \
                     && ?v1 <= \"25.65\"^^xsd:decimal\n    \
                 )\n\
             }"
        );
    }

    #[test]
    fn single_constant_clause() {
        let g = graph();
        let id = |s: &str| g.dictionary().lookup_iri(&format!("{EX}{s}")).unwrap();
        let mut p = GraphPattern::rooted(id("Person"), Domain::empty());
        p.add_clause(Clause { predicate: id("has_gender"), head: 0, tail: Term::Const(id("Female")) });
        let q = to_sparql(&p, &g);
        assert_eq!(q.select_vars, ["?v0"]);
        assert!(q.filters.is_empty());
        assert_eq!(q.where_triples.concat(), ["?v0 ns1:has_type ns1:Person", "?v0 ns1:has_gender ns1:Female"]);
    }

    #[test]
    fn regex_filter_is_anchored_and_escaped() {
        let g = graph();
        let id = |s: &str| g.dictionary().lookup_iri(&format!("{EX}{s}")).unwrap();
        let mut p = GraphPattern::rooted(id("Person"), Domain::empty());
        let r = crate::ranges::value_regex("mary ann");
        let v = p.add_var(VarKind::Range(Arc::new(RangeModel::Regex(r))), Domain::empty());
        p.add_clause(Clause { predicate: id("has_gender"), head: 0, tail: Term::Var(v) });
        let q = to_sparql(&p, &g);
        assert_eq!(q.filters, ["REGEX(?v1, \"^[a-z]{4}\\\\s[a-z]{3}$\")"]);
    }

    #[test]
    fn two_components_disjoin() {
        let g = graph();
        let model = RangeModel::Gaussian {
            components: vec![
                crate::pattern::Component { weight: 0.5, mean: 0.0, variance: 1.0 },
                crate::pattern::Component { weight: 0.5, mean: 10.0, variance: 4.0 },
            ],
            normalization: Default::default(),
            kind: ValueKind::Numeric,
        };
        let text = range_filter("?v1", &model, &mut Prefixes::fixed());
        assert_eq!(text.matches("||").count(), 1);
        assert!(text.contains("\"-1.00\"^^xsd:decimal"));
        assert!(text.contains("\"12.00\"^^xsd:decimal"));
        let _ = g;
    }
}
