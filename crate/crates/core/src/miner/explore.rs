//! Breadth-first combination of candidate clauses under one parent.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};

use dashmap::DashSet;
use serde::{Deserialize, Serialize};

use super::propagate::{attach, settle};
use super::{GenerationTelemetry, MinerConfig, Pruning};
use crate::base::{BaseClause, MinedPattern, PatternStore};
use crate::pattern::{canonical_string, metrics, tail_sort_key, GraphPattern, Term, VarId, VarKind};
use crate::rdf::KnowledgeGraph;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PruneReason {
    Support,
    NoReduction,
    Size,
    Tombstone,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `grace` is set when the pattern did not shrink its parent's root
    /// domain; its children then must.
    Keep { grace: bool },
    Prune(PruneReason),
}

/// A clause of the newest layer and the support of the pattern without it.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct LayerClause {
    pub object_tail: bool,
    pub support_without: usize,
}

/// Decides whether a supported pattern is kept.
///
/// `parent_support` and `parent_graced` describe the pattern without its
/// newest layer. Size limits are checked first. With reduction required,
/// every new clause whose tail is not an object-type variable must shrink the
/// root domain, and a pattern that does not shrink its parent's domain is
/// rejected when the parent did not shrink its own parent's domain either.
pub fn prune(
    pattern: &GraphPattern,
    parent_support: usize,
    parent_graced: bool,
    layer: &[LayerClause],
    config: &MinerConfig,
) -> Verdict {
    if pattern.support < config.min_support {
        return Verdict::Prune(PruneReason::Support);
    }
    let m = metrics(pattern);
    if m.length > config.max_length || m.width > config.max_width || pattern.generation > config.max_depth {
        return Verdict::Prune(PruneReason::Size);
    }
    let grace = pattern.support == parent_support;
    if config.require_reduction {
        let flat = layer
            .iter()
            .any(|c| !c.object_tail && pattern.support >= c.support_without);
        if flat || (grace && parent_graced) {
            return Verdict::Prune(PruneReason::NoReduction);
        }
    }
    Verdict::Keep { grace }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DedupOutcome {
    Fresh,
    Duplicate,
}

/// Records `canonical` in `seen`; reports whether it was there already.
pub fn dedup_check(canonical: &str, seen: &DashSet<String>) -> DedupOutcome {
    if seen.insert(canonical.to_owned()) {
        DedupOutcome::Fresh
    } else {
        DedupOutcome::Duplicate
    }
}

/// A parent with its candidate extensions.
pub struct Frontier<'a> {
    pub parent: &'a MinedPattern,
    /// Generation of the patterns produced.
    pub generation: usize,
    /// (attachment variable, clause), in a fixed order.
    pub candidates: Vec<(VarId, &'a BaseClause)>,
    /// For stars: the single clause of the parent, which every star keeps.
    pub star_base: Option<&'a BaseClause>,
    /// Support of the pattern without the newest layer.
    pub parent_support: usize,
    pub parent_graced: bool,
}

impl<'a> Frontier<'a> {
    /// Candidates for extending `parent` at object-type variables `d` hops
    /// below the root. At `d = 0` the parent is a base pattern and the
    /// candidates are the base clauses ordered after it, so each star is
    /// built from its smallest clause only.
    pub fn new(
        graph: &KnowledgeGraph,
        store: &'a PatternStore,
        parent: &'a MinedPattern,
        d: usize,
    ) -> Frontier<'a> {
        let p = &parent.pattern;
        if d == 0 {
            let t = p.root_type();
            let base = store.base.get(&t).map(Vec::as_slice).unwrap_or(&[]);
            let c = p.clauses[0];
            let key = match c.tail {
                Term::Const(r) => tail_sort_key(graph.dictionary(), Some(r), None),
                Term::Var(v) => tail_sort_key(graph.dictionary(), None, Some(&p.vars[v].kind)),
            };
            let pred = graph.dictionary().decode(c.predicate).to_string();
            let at = base.iter().position(|b| b.sort_key.0 == pred && b.sort_key.1 == key);
            let (star_base, candidates) = match at {
                Some(i) => (Some(&base[i]), base[i + 1..].iter().map(|b| (p.root, b)).collect()),
                None => (None, Vec::new()),
            };
            return Frontier {
                parent,
                generation: 1,
                candidates,
                star_base,
                parent_support: graph.members(t).len(),
                parent_graced: false,
            };
        }
        let mut candidates = Vec::new();
        for v in p.object_vars_at(d) {
            if let VarKind::Object(t) = p.vars[v].kind {
                if let Some(base) = store.base.get(&t) {
                    candidates.extend(base.iter().map(|b| (v, b)));
                }
            }
        }
        Frontier {
            parent,
            generation: d + 1,
            candidates,
            star_base: None,
            parent_support: p.support,
            parent_graced: parent.graced,
        }
    }
}

struct Node {
    pattern: GraphPattern,
    used: Vec<usize>,
    /// Candidates known to fail under this node; sorted.
    tombs: Vec<usize>,
}

/// Emits every kept combination of the frontier's candidates.
///
/// Combinations are built in increasing candidate order, one clause per
/// step. Under full pruning a candidate that fails the support or size
/// limits is not tried again under any extension of the same node. Returns
/// `None` if `stop` is raised.
pub fn explore(
    graph: &KnowledgeGraph,
    frontier: &Frontier<'_>,
    config: &MinerConfig,
    seen: &DashSet<String>,
    stop: &AtomicBool,
) -> Option<(Vec<MinedPattern>, GenerationTelemetry)> {
    let full = config.pruning == Pruning::Full;
    let dict = graph.dictionary();
    let cands = &frontier.candidates;
    let parent = frontier.parent;
    let mut tele = GenerationTelemetry {
        generation: frontier.generation,
        parents: 1,
        ..Default::default()
    };
    let mut out = Vec::new();
    let mut supports: HashMap<Vec<usize>, usize> = HashMap::new();
    supports.insert(Vec::new(), parent.pattern.support);

    let mut queue = VecDeque::from([Node {
        pattern: parent.pattern.clone(),
        used: Vec::new(),
        tombs: Vec::new(),
    }]);
    while let Some(node) = queue.pop_front() {
        if stop.load(Ordering::Relaxed) {
            return None;
        }
        let first = node.used.last().map_or(0, |&i| i + 1);
        let mut failures = Vec::new();
        let mut children = Vec::new();
        for (ci, &(at, clause)) in cands.iter().enumerate().skip(first) {
            if full && node.tombs.binary_search(&ci).is_ok() {
                tele.pruned.tombstone += 1;
                continue;
            }
            tele.candidates += 1;
            let mut child = node.pattern.clone();
            attach(&mut child, at, clause);
            let m = metrics(&child);
            if m.length > config.max_length || m.width > config.max_width {
                tele.pruned.size += 1;
                failures.push(ci);
                continue;
            }
            let canonical = canonical_string(&child, dict);
            if dedup_check(&canonical, seen) == DedupOutcome::Duplicate {
                tele.duplicates += 1;
                continue;
            }
            settle(graph, &mut child, &node.pattern, at, clause);
            child.generation = frontier.generation;
            let mut used = node.used.clone();
            used.push(ci);
            supports.insert(used.clone(), child.support);
            if child.support < config.min_support {
                tele.pruned.support += 1;
                failures.push(ci);
                continue;
            }
            if full
                && config.require_reduction
                && frontier.star_base.is_some()
                && !clause.tail.is_object()
                && child.support == node.pattern.support
            {
                // Every star containing this clause keeps the same support
                // without it, so none of them can be emitted.
                tele.pruned.no_reduction += 1;
                continue;
            }
            children.push((child, used, canonical, m));
        }

        let tombs = if full { merge_sorted(&node.tombs, &failures) } else { Vec::new() };
        for (child, used, canonical, m) in children {
            let layer = new_layer(graph, frontier, config, &child, &used, &mut supports);
            match prune(&child, frontier.parent_support, frontier.parent_graced, &layer, config) {
                Verdict::Keep { grace } => {
                    tele.emitted += 1;
                    out.push(MinedPattern {
                        pattern: child.clone(),
                        canonical,
                        parent: Some(parent.canonical.clone()),
                        metrics: m,
                        graced: grace,
                    });
                }
                Verdict::Prune(PruneReason::Support) => tele.pruned.support += 1,
                Verdict::Prune(PruneReason::Size) => tele.pruned.size += 1,
                Verdict::Prune(_) => tele.pruned.no_reduction += 1,
            }
            queue.push_back(Node {
                pattern: child,
                used,
                tombs: tombs.clone(),
            });
        }
    }
    if out.is_empty() {
        tele.barren = 1;
    }
    Some((out, tele))
}

/// Clauses of the newest layer with the support each one's removal leaves.
fn new_layer(
    graph: &KnowledgeGraph,
    frontier: &Frontier<'_>,
    config: &MinerConfig,
    child: &GraphPattern,
    used: &[usize],
    supports: &mut HashMap<Vec<usize>, usize>,
) -> Vec<LayerClause> {
    if !config.require_reduction || child.support < config.min_support {
        return Vec::new();
    }
    let cands = &frontier.candidates;
    let mut layer = Vec::with_capacity(used.len() + 1);
    for (k, &ci) in used.iter().enumerate() {
        let object_tail = cands[ci].1.tail.is_object();
        let support_without = if object_tail {
            0
        } else {
            let rest: Vec<usize> = used[..k].iter().chain(&used[k + 1..]).copied().collect();
            match supports.get(&rest) {
                Some(&s) => s,
                None => {
                    let s = build(graph, &frontier.parent.pattern, cands, &rest).support;
                    supports.insert(rest, s);
                    s
                }
            }
        };
        layer.push(LayerClause {
            object_tail,
            support_without,
        });
    }
    if let Some(b) = frontier.star_base {
        if !b.tail.is_object() {
            let root = GraphPattern::rooted(b.head_type, graph.members(b.head_type).clone());
            layer.push(LayerClause {
                object_tail: false,
                support_without: build(graph, &root, cands, used).support,
            });
        }
    }
    layer
}

/// `base` extended by the listed candidates, with domains.
fn build(graph: &KnowledgeGraph, base: &GraphPattern, cands: &[(VarId, &BaseClause)], used: &[usize]) -> GraphPattern {
    let mut p = base.clone();
    for &ci in used {
        let (at, clause) = cands[ci];
        let prev = p.clone();
        attach(&mut p, at, clause);
        settle(graph, &mut p, &prev, at, clause);
    }
    p
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::rdf::ResourceId;

    fn pattern(support: usize, clauses: usize) -> GraphPattern {
        let mut p = GraphPattern::rooted(ResourceId(0), Domain::empty());
        for i in 0..clauses {
            p.add_clause(crate::pattern::Clause {
                predicate: ResourceId(1),
                head: 0,
                tail: Term::Const(ResourceId(10 + i as u32)),
            });
        }
        p.support = support;
        p.generation = 1;
        p
    }

    fn config() -> MinerConfig {
        MinerConfig {
            min_support: 1,
            max_length: 3,
            ..MinerConfig::default()
        }
    }

    #[test]
    fn constant_without_reduction_is_pruned() {
        let layer = [LayerClause { object_tail: false, support_without: 5 }];
        assert_eq!(prune(&pattern(5, 2), 5, false, &layer, &config()), Verdict::Prune(PruneReason::NoReduction));
    }

    #[test]
    fn object_tail_without_reduction_gets_grace() {
        let layer = [LayerClause { object_tail: true, support_without: 0 }];
        assert_eq!(prune(&pattern(5, 2), 5, false, &layer, &config()), Verdict::Keep { grace: true });
        // A graced parent gets no second round.
        assert_eq!(prune(&pattern(5, 2), 5, true, &layer, &config()), Verdict::Prune(PruneReason::NoReduction));
    }

    #[test]
    fn length_over_limit_is_size() {
        let layer = [LayerClause { object_tail: false, support_without: 9 }];
        assert_eq!(prune(&pattern(5, 4), 9, false, &layer, &config()), Verdict::Prune(PruneReason::Size));
    }

    #[test]
    fn reduction_not_required_keeps() {
        let cfg = MinerConfig {
            require_reduction: false,
            ..config()
        };
        let layer = [LayerClause { object_tail: false, support_without: 5 }];
        assert_eq!(prune(&pattern(5, 2), 5, true, &layer, &cfg), Verdict::Keep { grace: true });
    }

    #[test]
    fn dedup_first_and_repeat() {
        let seen = DashSet::new();
        assert_eq!(dedup_check("a & b", &seen), DedupOutcome::Fresh);
        assert_eq!(dedup_check("a & b", &seen), DedupOutcome::Duplicate);
        assert_eq!(dedup_check("a & c", &seen), DedupOutcome::Fresh);
    }
}
