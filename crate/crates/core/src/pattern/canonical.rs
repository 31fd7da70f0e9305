use super::{GraphPattern, Term, VarId, VarKind};
use crate::rdf::{Dictionary, ResourceId};

/// Sort key of a clause tail: kind rank, then a printable key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TailKey {
    pub rank: u8,
    pub key: String,
}

/// Tail key for a constant (`None` kind) or a variable of the given kind.
pub fn tail_sort_key(dict: &Dictionary, constant: Option<ResourceId>, kind: Option<&VarKind>) -> TailKey {
    match (constant, kind) {
        (Some(r), _) => TailKey {
            rank: 0,
            key: dict.decode(r).to_string(),
        },
        (None, Some(VarKind::Object(t))) => TailKey {
            rank: 1,
            key: dict.decode(*t).to_string(),
        },
        (None, Some(VarKind::Data(t))) => TailKey {
            rank: 2,
            key: dict.decode(*t).to_string(),
        },
        (None, Some(VarKind::Range(m))) => TailKey {
            rank: 3,
            key: m.key(),
        },
        (None, None) => panic!("tail needs a constant or a variable kind"),
    }
}

struct Entry {
    clause: usize,
    sort: (String, TailKey, String),
}

/// Order-independent text form of a pattern.
///
/// Children of each variable are sorted by predicate, tail kind, tail key,
/// and the anonymous form of their subtree; variables are then named
/// `?v0, ?v1, ...` in pre-order. Two patterns get the same string exactly
/// when they are isomorphic.
pub fn canonical_string(p: &GraphPattern, dict: &Dictionary) -> String {
    canonical_form(p, dict).0
}

/// Variable naming and clause order used by [`canonical_string`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalOrder {
    /// Canonical index of each variable, by variable id.
    pub names: Vec<usize>,
    /// Clause indices in rendering order.
    pub clauses: Vec<usize>,
}

pub fn canonical_order(p: &GraphPattern, dict: &Dictionary) -> CanonicalOrder {
    canonical_form(p, dict).1
}

fn canonical_form(p: &GraphPattern, dict: &Dictionary) -> (String, CanonicalOrder) {
    let children = p.children();
    let mut sorted: Vec<Vec<usize>> = vec![Vec::new(); p.vars.len()];
    anonymous(p, dict, &children, p.root, &mut sorted);

    let mut names = vec![usize::MAX; p.vars.len()];
    let mut next = 0;
    let mut clauses = Vec::with_capacity(p.clauses.len());
    let mut order = Vec::with_capacity(p.clauses.len());
    names[p.root] = next;
    next += 1;
    render(p, dict, &sorted, p.root, &mut names, &mut next, &mut clauses, &mut order);
    let root_type = dict.decode(p.root_type());
    let text = format!("?v0:{root_type} | {}", clauses.join(" & "));
    (text, CanonicalOrder { names, clauses: order })
}

fn tail_key(p: &GraphPattern, dict: &Dictionary, tail: Term) -> TailKey {
    match tail {
        Term::Const(r) => tail_sort_key(dict, Some(r), None),
        Term::Var(v) => tail_sort_key(dict, None, Some(&p.vars[v].kind)),
    }
}

/// Returns the anonymous subtree form of `v` and records its sorted children.
fn anonymous(
    p: &GraphPattern,
    dict: &Dictionary,
    children: &[Vec<usize>],
    v: VarId,
    sorted: &mut Vec<Vec<usize>>,
) -> String {
    let mut entries: Vec<Entry> = children[v]
        .iter()
        .map(|&ci| {
            let c = p.clauses[ci];
            let sub = match c.tail {
                Term::Var(t) if p.vars[t].kind.is_object() => anonymous(p, dict, children, t, sorted),
                _ => String::new(),
            };
            Entry {
                clause: ci,
                sort: (dict.decode(c.predicate).to_string(), tail_key(p, dict, c.tail), sub),
            }
        })
        .collect();
    entries.sort_by(|a, b| a.sort.cmp(&b.sort));
    let text: Vec<String> = entries
        .iter()
        .map(|e| format!("{} {}{}{}", e.sort.0, e.sort.1.rank, e.sort.1.key, e.sort.2))
        .collect();
    sorted[v] = entries.iter().map(|e| e.clause).collect();
    format!("{{{}}}", text.join(";"))
}

#[allow(clippy::too_many_arguments)]
fn render(
    p: &GraphPattern,
    dict: &Dictionary,
    sorted: &[Vec<usize>],
    v: VarId,
    names: &mut Vec<usize>,
    next: &mut usize,
    out: &mut Vec<String>,
    order: &mut Vec<usize>,
) {
    for &ci in &sorted[v] {
        order.push(ci);
        let c = p.clauses[ci];
        let pred = dict.decode(c.predicate);
        let tail = match c.tail {
            Term::Const(r) => dict.decode(r).to_string(),
            Term::Var(t) => {
                names[t] = *next;
                *next += 1;
                let name = names[t];
                match &p.vars[t].kind {
                    VarKind::Object(ty) => format!("?v{name}:{}", dict.decode(*ty)),
                    VarKind::Data(dt) => format!("?v{name}^^{}", dict.decode(*dt)),
                    VarKind::Range(m) => format!("?v{name}~{}", m.key()),
                }
            }
        };
        out.push(format!("{pred}(?v{},{tail})", names[v]));
        if let Term::Var(t) = c.tail {
            if p.vars[t].kind.is_object() {
                render(p, dict, sorted, t, names, next, out, order);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::pattern::{Clause, RangeModel};
    use crate::rdf::{Literal, Resource};
    use proptest::prelude::*;
    use std::sync::Arc;

    struct Fixture {
        dict: Dictionary,
        ids: Vec<ResourceId>,
    }

    fn fixture() -> Fixture {
        let mut dict = Dictionary::default();
        let ids = [
            "Death_Certificate",
            "Person",
            "has_subject",
            "has_type",
            "at_age",
            "has_gender",
            "has_occupation",
            "Female",
            "H.0-2",
        ]
        .iter()
        .map(|s| dict.encode(&Resource::iri(format!("http://example.org/{s}"))))
        .collect();
        Fixture { dict, ids }
    }

    /// Builds the age_pattern pattern inserting clauses in the given order.
    fn age_pattern(f: &Fixture, order: &[usize]) -> GraphPattern {
        let i = &f.ids;
        let mut p = GraphPattern::rooted(i[0], Domain::empty());
        let vi = p.add_var(VarKind::Object(i[1]), Domain::empty());
        let vk = p.add_var(VarKind::Range(Arc::new(RangeModel::numeric(24.5, 1.32))), Domain::empty());
        let clauses = [
            Clause { predicate: i[5], head: vi, tail: Term::Const(i[7]) },
            Clause { predicate: i[6], head: vi, tail: Term::Const(i[8]) },
            Clause { predicate: i[2], head: 0, tail: Term::Var(vi) },
            Clause { predicate: i[3], head: 0, tail: Term::Const(i[0]) },
            Clause { predicate: i[4], head: 0, tail: Term::Var(vk) },
        ];
        for &o in order {
            p.add_clause(clauses[o]);
        }
        p
    }

    #[test]
    fn age_pattern_golden() {
        let f = fixture();
        let p = age_pattern(&f, &[0, 1, 2, 3, 4]);
        assert_eq!(
            canonical_string(&p, &f.dict),
            "?v0:<http://example.org/Death_Certificate> | \
             <http://example.org/at_age>(?v0,?v1~N<num>(1;24.5;1.32)) & \
             <http://example.org/has_subject>(?v0,?v2:<http://example.org/Person>) & \
             <http://example.org/has_gender>(?v2,<http://example.org/Female>) & \
             <http://example.org/has_occupation>(?v2,<http://example.org/H.0-2>) & \
             <http://example.org/has_type>(?v0,<http://example.org/Death_Certificate>)"
        );
    }

    #[test]
    fn constants_distinguish() {
        let mut f = fixture();
        let male = f.dict.encode(&Resource::iri("http://example.org/Male"));
        let a = age_pattern(&f, &[0, 1, 2, 3, 4]);
        let mut b = a.clone();
        b.clauses[0].tail = Term::Const(male);
        assert_ne!(canonical_string(&a, &f.dict), canonical_string(&b, &f.dict));
        let lit = f.dict.encode(&Resource::Literal(Literal::plain("Female")));
        b.clauses[0].tail = Term::Const(lit);
        assert_ne!(canonical_string(&a, &f.dict), canonical_string(&b, &f.dict));
    }

    #[test]
    fn range_parameters_distinguish() {
        let f = fixture();
        let a = age_pattern(&f, &[0, 1, 2, 3, 4]);
        let mut b = a.clone();
        b.vars[2].kind = VarKind::Range(Arc::new(RangeModel::numeric(24.5, 1.33)));
        assert_ne!(canonical_string(&a, &f.dict), canonical_string(&b, &f.dict));
    }

    proptest! {
        #[test]
        fn insertion_order_does_not_matter(order in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle()) {
            let f = fixture();
            let a = canonical_string(&age_pattern(&f, &[0, 1, 2, 3, 4]), &f.dict);
            let b = canonical_string(&age_pattern(&f, &order), &f.dict);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn variable_ids_do_not_matter(swap in any::<bool>()) {
            let f = fixture();
            let i = &f.ids;
            // Same pattern with the two tail variables allocated in either order.
            let mut p = GraphPattern::rooted(i[0], Domain::empty());
            let (vi, vk) = if swap {
                let vk = p.add_var(VarKind::Range(Arc::new(RangeModel::numeric(24.5, 1.32))), Domain::empty());
                (p.add_var(VarKind::Object(i[1]), Domain::empty()), vk)
            } else {
                let vi = p.add_var(VarKind::Object(i[1]), Domain::empty());
                (vi, p.add_var(VarKind::Range(Arc::new(RangeModel::numeric(24.5, 1.32))), Domain::empty()))
            };
            p.add_clause(Clause { predicate: i[4], head: 0, tail: Term::Var(vk) });
            p.add_clause(Clause { predicate: i[2], head: 0, tail: Term::Var(vi) });
            p.add_clause(Clause { predicate: i[5], head: vi, tail: Term::Const(i[7]) });
            let s = canonical_string(&p, &f.dict);
            prop_assert_eq!(&s, &canonical_string(&p, &f.dict));
            prop_assert!(s.starts_with("?v0:<http://example.org/Death_Certificate> | <http://example.org/at_age>(?v0,?v1~"));
        }
    }
}
