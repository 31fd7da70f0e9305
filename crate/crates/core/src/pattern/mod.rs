//! Clauses, variables and tree-shaped graph patterns.

mod canonical;
mod range;

pub use canonical::{canonical_order, canonical_string, tail_sort_key, CanonicalOrder, TailKey};
pub use range::{membership, Bounds, Component, Normalization, RangeModel, ValueKind};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::rdf::ResourceId;

pub type VarId = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum VarKind {
    /// Ranges over entities of a type.
    Object(ResourceId),
    /// Ranges over literals of a datatype.
    Data(ResourceId),
    Range(Arc<RangeModel>),
}

impl VarKind {
    pub fn is_object(&self) -> bool {
        matches!(self, VarKind::Object(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Const(ResourceId),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub predicate: ResourceId,
    pub head: VarId,
    pub tail: Term,
}

/// A connected conjunction of clauses forming a tree rooted at `root`.
///
/// `domains[v]` holds the candidate bindings of variable `v`; after domain
/// propagation every member takes part in some match of the whole pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphPattern {
    pub vars: Vec<Variable>,
    pub clauses: Vec<Clause>,
    pub root: VarId,
    pub domains: Vec<Domain>,
    pub support: usize,
    pub generation: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub depth: usize,
    pub length: usize,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    HeadNotObject { clause: usize },
    Disconnected { var: VarId },
    NonTerminalTail { clause: usize },
    NotATree { var: VarId },
    UnknownVariable { clause: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "pattern has no clauses"),
            Violation::HeadNotObject { clause } => {
                write!(f, "clause {clause}: head is not an object-type variable")
            }
            Violation::Disconnected { var } => write!(f, "variable ?v{var} is not connected to the root"),
            Violation::NonTerminalTail { clause } => {
                write!(f, "clause {clause}: non-terminal tail is not an object-type variable")
            }
            Violation::NotATree { var } => write!(f, "variable ?v{var} is introduced more than once"),
            Violation::UnknownVariable { clause } => write!(f, "clause {clause}: unknown variable"),
        }
    }
}

impl GraphPattern {
    /// A clause-less pattern over entities of type `t`.
    pub fn rooted(t: ResourceId, domain: Domain) -> Self {
        GraphPattern {
            vars: vec![Variable {
                id: 0,
                kind: VarKind::Object(t),
            }],
            clauses: Vec::new(),
            root: 0,
            support: domain.len(),
            domains: vec![domain],
            generation: 0,
        }
    }

    pub fn root_type(&self) -> ResourceId {
        match self.vars[self.root].kind {
            VarKind::Object(t) => t,
            _ => unreachable!("root is always an object-type variable"),
        }
    }

    /// Adds a variable with the given starting domain and returns its id.
    pub fn add_var(&mut self, kind: VarKind, domain: Domain) -> VarId {
        let id = self.vars.len();
        self.vars.push(Variable { id, kind });
        self.domains.push(domain);
        id
    }

    pub fn add_clause(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    /// Clause indices per head variable, in insertion order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vars.len()];
        for (i, c) in self.clauses.iter().enumerate() {
            out[c.head].push(i);
        }
        out
    }

    /// Hop distance of each variable from the root; `usize::MAX` if unreachable.
    pub fn var_depths(&self) -> Vec<usize> {
        let children = self.children();
        let mut depth = vec![usize::MAX; self.vars.len()];
        depth[self.root] = 0;
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for &ci in &children[v] {
                if let Term::Var(t) = self.clauses[ci].tail {
                    if depth[t] == usize::MAX {
                        depth[t] = depth[v] + 1;
                        stack.push(t);
                    }
                }
            }
        }
        depth
    }

    /// Object-type tail variables at hop distance `d` from the root.
    pub fn object_vars_at(&self, d: usize) -> Vec<VarId> {
        let depths = self.var_depths();
        (0..self.vars.len())
            .filter(|&v| v != self.root && depths[v] == d && self.vars[v].kind.is_object())
            .collect()
    }

    pub fn validate(&self) -> Result<(), Violation> {
        validate(self)
    }

    pub fn metrics(&self) -> PatternMetrics {
        metrics(self)
    }
}

/// Checks the clause rules: heads are object-type variables, all variables
/// hang off the root, and non-terminal tails are object-type variables.
pub fn validate(p: &GraphPattern) -> Result<(), Violation> {
    if p.clauses.is_empty() {
        return Err(Violation::Empty);
    }
    let n = p.vars.len();
    for (i, c) in p.clauses.iter().enumerate() {
        if c.head >= n || matches!(c.tail, Term::Var(v) if v >= n) {
            return Err(Violation::UnknownVariable { clause: i });
        }
        if !p.vars[c.head].kind.is_object() {
            return Err(Violation::HeadNotObject { clause: i });
        }
    }
    let mut introduced = vec![0usize; n];
    for c in &p.clauses {
        if let Term::Var(v) = c.tail {
            introduced[v] += 1;
        }
    }
    for c in &p.clauses {
        if c.head != p.root && introduced[c.head] == 0 {
            return Err(Violation::Disconnected { var: c.head });
        }
    }
    for (i, c) in p.clauses.iter().enumerate() {
        if let Term::Var(v) = c.tail {
            let is_head = p.clauses.iter().any(|o| o.head == v);
            if is_head && !p.vars[v].kind.is_object() {
                return Err(Violation::NonTerminalTail { clause: i });
            }
        }
    }
    if introduced[p.root] > 0 {
        return Err(Violation::NotATree { var: p.root });
    }
    if let Some(v) = (0..n).find(|&v| introduced[v] > 1) {
        return Err(Violation::NotATree { var: v });
    }
    let depths = p.var_depths();
    let used = |v: VarId| p.clauses.iter().any(|c| c.head == v || c.tail == Term::Var(v));
    if let Some(v) = (0..n).find(|&v| v != p.root && used(v) && depths[v] == usize::MAX) {
        return Err(Violation::Disconnected { var: v });
    }
    Ok(())
}

/// Depth is the longest path between two elements of the pattern graph, in
/// edges. Data-type and value-range tails count one extra hop for the
/// datatype or distribution they stand for.
pub fn metrics(p: &GraphPattern) -> PatternMetrics {
    let children = p.children();
    // height[v]: longest downward path from v to an element, in edges.
    fn walk(p: &GraphPattern, children: &[Vec<usize>], v: VarId, best: &mut usize) -> usize {
        let mut top = [0usize; 2];
        for &ci in &children[v] {
            let h = match p.clauses[ci].tail {
                Term::Const(_) => 1,
                Term::Var(t) => match p.vars[t].kind {
                    VarKind::Object(_) => 1 + walk(p, children, t, best),
                    _ => 2,
                },
            };
            if h > top[0] {
                top = [h, top[0]];
            } else if h > top[1] {
                top[1] = h;
            }
        }
        *best = (*best).max(top[0] + top[1]);
        top[0]
    }
    let mut depth = 0;
    walk(p, &children, p.root, &mut depth);
    PatternMetrics {
        depth,
        length: p.clauses.len(),
        width: children.iter().map(Vec::len).max().unwrap_or(0),
    }
}
