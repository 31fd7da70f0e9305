use std::collections::{BTreeMap, HashMap, HashSet};

use super::{Resource, ResourceId, RawTriple};
use crate::domain::Domain;
use crate::error::{Error, Result};

/// Bijection between resources and dense ids, assigned in first-seen order.
#[derive(Clone, Debug, Default)]
pub struct Dictionary {
    terms: Vec<Resource>,
    ids: HashMap<Resource, ResourceId>,
}

impl Dictionary {
    pub fn encode(&mut self, term: &Resource) -> ResourceId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = ResourceId(u32::try_from(self.terms.len()).expect("more than 2^32 resources"));
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    pub fn lookup(&self, term: &Resource) -> Option<ResourceId> {
        self.ids.get(term).copied()
    }

    pub fn lookup_iri(&self, iri: &str) -> Option<ResourceId> {
        self.lookup(&Resource::Iri(iri.to_owned()))
    }

    /// Panics on ids not issued by this dictionary.
    pub fn decode(&self, id: ResourceId) -> &Resource {
        &self.terms[id.index()]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResourceId, &Resource)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, r)| (ResourceId(i as u32), r))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assertion {
    pub predicate: ResourceId,
    pub head: ResourceId,
    pub tail: ResourceId,
}

/// Dictionary-encoded labelled multidigraph. Immutable once built.
#[derive(Debug)]
pub struct KnowledgeGraph {
    dict: Dictionary,
    assertions: Vec<Assertion>,
    type_predicate: ResourceId,
    type_index: BTreeMap<ResourceId, Domain>,
    entity_types: HashMap<ResourceId, Vec<ResourceId>>,
    pred_index: HashMap<(ResourceId, ResourceId), Vec<Assertion>>,
    datatype_index: BTreeMap<ResourceId, Domain>,
    literal_datatype: HashMap<ResourceId, ResourceId>,
    forward: HashMap<(ResourceId, ResourceId), Vec<ResourceId>>,
    backward: HashMap<(ResourceId, ResourceId), Vec<ResourceId>>,
    predicates: Vec<ResourceId>,
}

/// Encodes `triples` and builds the type, predicate, and datatype indexes.
///
/// Duplicate triples collapse to one assertion. Objects of the type predicate
/// that are literals do not type anything.
pub fn build_graph(triples: &[RawTriple], type_predicate: &str) -> Result<KnowledgeGraph> {
    let mut dict = Dictionary::default();
    let mut assertions = Vec::with_capacity(triples.len());
    let mut seen = HashSet::with_capacity(triples.len());
    for t in triples {
        if !t.subject.is_entity() {
            return Err(Error::LiteralSubject { line: t.line });
        }
        if t.predicate.as_iri().is_none() {
            return Err(Error::Parse {
                line: t.line,
                message: "predicate must be an IRI".into(),
            });
        }
        let head = dict.encode(&t.subject);
        let predicate = dict.encode(&t.predicate);
        let tail = dict.encode(&t.object);
        let a = Assertion {
            predicate,
            head,
            tail,
        };
        if seen.insert(a) {
            assertions.push(a);
        }
    }
    let type_predicate = dict.encode(&Resource::iri(type_predicate));

    let mut type_members: BTreeMap<ResourceId, Vec<ResourceId>> = BTreeMap::new();
    let mut entity_types: HashMap<ResourceId, Vec<ResourceId>> = HashMap::new();
    for a in assertions.iter().filter(|a| a.predicate == type_predicate) {
        if dict.decode(a.tail).is_entity() {
            type_members.entry(a.tail).or_default().push(a.head);
            entity_types.entry(a.head).or_default().push(a.tail);
        }
    }
    for types in entity_types.values_mut() {
        types.sort_unstable();
        types.dedup();
    }

    let mut literal_datatype = HashMap::new();
    let mut datatype_members: BTreeMap<ResourceId, Vec<ResourceId>> = BTreeMap::new();
    let literals: Vec<(ResourceId, String)> = dict
        .iter()
        .filter_map(|(id, r)| r.as_literal().map(|l| (id, l.datatype.clone())))
        .collect();
    for (id, datatype) in literals {
        let dt = dict.encode(&Resource::Iri(datatype));
        literal_datatype.insert(id, dt);
        datatype_members.entry(dt).or_default().push(id);
    }

    let mut pred_index: HashMap<(ResourceId, ResourceId), Vec<Assertion>> = HashMap::new();
    let mut forward: HashMap<(ResourceId, ResourceId), Vec<ResourceId>> = HashMap::new();
    let mut backward: HashMap<(ResourceId, ResourceId), Vec<ResourceId>> = HashMap::new();
    let mut predicates = Vec::new();
    for a in &assertions {
        forward.entry((a.predicate, a.head)).or_default().push(a.tail);
        backward.entry((a.predicate, a.tail)).or_default().push(a.head);
        predicates.push(a.predicate);
        if let Some(types) = entity_types.get(&a.head) {
            for &t in types {
                pred_index.entry((a.predicate, t)).or_default().push(*a);
            }
        }
    }
    for list in forward.values_mut().chain(backward.values_mut()) {
        list.sort_unstable();
    }
    predicates.sort_unstable();
    predicates.dedup();

    Ok(KnowledgeGraph {
        dict,
        assertions,
        type_predicate,
        type_index: type_members
            .into_iter()
            .map(|(t, m)| (t, Domain::from_unsorted(m)))
            .collect(),
        entity_types,
        pred_index,
        datatype_index: datatype_members
            .into_iter()
            .map(|(t, m)| (t, Domain::from_unsorted(m)))
            .collect(),
        literal_datatype,
        forward,
        backward,
        predicates,
    })
}

impl KnowledgeGraph {
    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn resource(&self, id: ResourceId) -> &Resource {
        self.dict.decode(id)
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn type_predicate(&self) -> ResourceId {
        self.type_predicate
    }

    /// Types with at least one member, in id order.
    pub fn types(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.type_index.keys().copied()
    }

    pub fn type_index(&self) -> &BTreeMap<ResourceId, Domain> {
        &self.type_index
    }

    /// Entities of type `t`; empty for unknown types.
    pub fn members(&self, t: ResourceId) -> &Domain {
        static EMPTY: Domain = Domain::empty();
        self.type_index.get(&t).unwrap_or(&EMPTY)
    }

    pub fn types_of(&self, entity: ResourceId) -> &[ResourceId] {
        self.entity_types.get(&entity).map_or(&[], Vec::as_slice)
    }

    pub fn has_type(&self, entity: ResourceId, t: ResourceId) -> bool {
        self.types_of(entity).binary_search(&t).is_ok()
    }

    /// Assertions with predicate `p` whose head has type `head_type`.
    pub fn by_predicate_and_type(&self, p: ResourceId, head_type: ResourceId) -> &[Assertion] {
        self.pred_index.get(&(p, head_type)).map_or(&[], Vec::as_slice)
    }

    pub fn datatype_index(&self) -> &BTreeMap<ResourceId, Domain> {
        &self.datatype_index
    }

    pub fn literals_of_datatype(&self, dt: ResourceId) -> &Domain {
        static EMPTY: Domain = Domain::empty();
        self.datatype_index.get(&dt).unwrap_or(&EMPTY)
    }

    pub fn datatype_of(&self, literal: ResourceId) -> Option<ResourceId> {
        self.literal_datatype.get(&literal).copied()
    }

    /// Sorted tails `t` with `p(head, t)`.
    pub fn objects(&self, p: ResourceId, head: ResourceId) -> &[ResourceId] {
        self.forward.get(&(p, head)).map_or(&[], Vec::as_slice)
    }

    /// Sorted heads `h` with `p(h, tail)`.
    pub fn subjects(&self, p: ResourceId, tail: ResourceId) -> &[ResourceId] {
        self.backward.get(&(p, tail)).map_or(&[], Vec::as_slice)
    }

    pub fn predicates(&self) -> &[ResourceId] {
        &self.predicates
    }

    pub fn contains(&self, p: ResourceId, head: ResourceId, tail: ResourceId) -> bool {
        self.objects(p, head).binary_search(&tail).is_ok()
    }
}
