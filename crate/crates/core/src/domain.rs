//! Sorted sets of resource ids, the unit of all domain arithmetic.

use crate::rdf::ResourceId;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Domain(Vec<ResourceId>);

impl Domain {
    pub const fn empty() -> Self {
        Domain(Vec::new())
    }

    pub fn from_unsorted(mut ids: Vec<ResourceId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Domain(ids)
    }

    /// Caller guarantees `ids` is strictly increasing.
    pub fn from_sorted(ids: Vec<ResourceId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Domain(ids)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: ResourceId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn as_slice(&self) -> &[ResourceId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.0.iter().copied()
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len().min(b.len()));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Domain(out)
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.len() <= other.len() && self.iter().all(|x| other.contains(x))
    }

    /// Keeps the members satisfying `keep`; returns whether anything was removed.
    pub fn retain(&mut self, mut keep: impl FnMut(ResourceId) -> bool) -> bool {
        let before = self.0.len();
        self.0.retain(|&id| keep(id));
        self.0.len() != before
    }
}

impl FromIterator<ResourceId> for Domain {
    fn from_iter<I: IntoIterator<Item = ResourceId>>(iter: I) -> Self {
        Domain::from_unsorted(iter.into_iter().collect())
    }
}
