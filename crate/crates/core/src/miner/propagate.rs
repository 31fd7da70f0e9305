//! Semi-join domain reduction over tree patterns.

use crate::base::{BaseClause, BaseTail};
use crate::domain::Domain;
use crate::pattern::{Clause, GraphPattern, Term, VarId, VarKind};
use crate::rdf::KnowledgeGraph;

/// Shrinks every variable domain to the members that take part in some match
/// of the whole pattern: one pass up towards the root, one pass down.
pub fn reduce(graph: &KnowledgeGraph, p: &mut GraphPattern) {
    let children = p.children();
    let order = preorder(p, &children);
    for &v in order.iter().rev() {
        restrict_by_children(graph, p, &children[v], v);
    }
    for &v in &order {
        restrict_children(graph, p, &children[v], v);
    }
    p.support = p.domains[p.root].len();
}

/// Extends `parent` with the base clause `ext` hung off variable `at`.
///
/// The attachment domain is intersected with the clause's head domain, the
/// new tail starts from the clause's tail domain, and the change is then
/// propagated through the rest of the pattern.
pub fn propagate_domain(graph: &KnowledgeGraph, parent: &GraphPattern, at: VarId, ext: &BaseClause) -> GraphPattern {
    let mut p = parent.clone();
    attach(&mut p, at, ext);
    settle(graph, &mut p, parent, at, ext);
    p
}

/// Appends the clause to the structure only. A variable tail gets an empty
/// placeholder domain until [`settle`] runs.
pub(crate) fn attach(p: &mut GraphPattern, at: VarId, ext: &BaseClause) {
    let tail = match &ext.tail {
        BaseTail::Const(r) => Term::Const(*r),
        other => {
            let kind = other.var_kind().expect("variable tail");
            Term::Var(p.add_var(kind, Domain::empty()))
        }
    };
    p.add_clause(Clause {
        predicate: ext.predicate,
        head: at,
        tail,
    });
}

/// Domain work for a clause just attached by [`attach`] to a copy of `parent`.
pub(crate) fn settle(graph: &KnowledgeGraph, p: &mut GraphPattern, parent: &GraphPattern, at: VarId, ext: &BaseClause) {
    if let Term::Var(t) = p.clauses.last().expect("attached clause").tail {
        p.domains[t] = ext.tail_domain.clone();
    }
    p.domains[at] = p.domains[at].intersect(&ext.head_domain);
    if p.domains[at].len() == parent.domains[at].len() && !ext.tail.is_variable() {
        // A constant tail that keeps every binding of `at` changes nothing.
        p.support = parent.support;
        return;
    }
    reduce(graph, p);
}

fn preorder(p: &GraphPattern, children: &[Vec<usize>]) -> Vec<VarId> {
    let mut order = Vec::with_capacity(p.vars.len());
    let mut stack = vec![p.root];
    while let Some(v) = stack.pop() {
        order.push(v);
        for &ci in children[v].iter().rev() {
            if let Term::Var(t) = p.clauses[ci].tail {
                stack.push(t);
            }
        }
    }
    order
}

fn restrict_by_children(graph: &KnowledgeGraph, p: &mut GraphPattern, clauses: &[usize], v: VarId) {
    if clauses.is_empty() {
        return;
    }
    let mut dom = std::mem::take(&mut p.domains[v]);
    for &ci in clauses {
        let c = p.clauses[ci];
        match c.tail {
            Term::Const(r) => {
                dom.retain(|x| graph.contains(c.predicate, x, r));
            }
            Term::Var(t) => {
                let tails = &p.domains[t];
                dom.retain(|x| graph.objects(c.predicate, x).iter().any(|&y| tails.contains(y)));
            }
        }
    }
    p.domains[v] = dom;
}

fn restrict_children(graph: &KnowledgeGraph, p: &mut GraphPattern, clauses: &[usize], v: VarId) {
    for &ci in clauses {
        let c = p.clauses[ci];
        if let Term::Var(t) = c.tail {
            let mut dom = std::mem::take(&mut p.domains[t]);
            let heads = &p.domains[v];
            dom.retain(|y| graph.subjects(c.predicate, y).iter().any(|&x| heads.contains(x)));
            p.domains[t] = dom;
        }
    }
}

/// Starting domain of a variable before any clause constrains it.
pub fn initial_domain(graph: &KnowledgeGraph, kind: &VarKind) -> Domain {
    match kind {
        VarKind::Object(t) => graph.members(*t).clone(),
        VarKind::Data(dt) => graph.literals_of_datatype(*dt).clone(),
        VarKind::Range(model) => graph
            .dictionary()
            .iter()
            .filter(|(_, r)| crate::pattern::membership(model, r))
            .map(|(id, _)| id)
            .collect(),
    }
}
