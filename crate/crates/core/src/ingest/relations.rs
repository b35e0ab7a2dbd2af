use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One deduplicated (referring root domain, project) observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkRelation {
    pub referring_domain: String,
    /// Public suffix of the referring domain.
    pub referring_tld: String,
    pub project_id: String,
    /// Country code as reported by the provider, when present.
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RelationMeta {
    referring_tld: String,
    country: Option<String>,
}

/// A set of [`LinkRelation`]s keyed on (referring_domain, project_id).
///
/// Inserting the same pair again merges metadata instead of duplicating the
/// relation, so the set is invariant under input duplication and input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationSet {
    map: BTreeMap<(String, String), RelationMeta>,
}

impl RelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a relation; returns true when the (domain, project) pair was
    /// not present yet. Conflicting country metadata is merged by preferring
    /// a present value, then the lexicographically smaller one, which keeps
    /// the result independent of insertion order.
    pub fn insert(&mut self, relation: LinkRelation) -> bool {
        let key = (relation.referring_domain, relation.project_id);
        match self.map.get_mut(&key) {
            Some(meta) => {
                meta.country = merge_country(meta.country.take(), relation.country);
                false
            }
            None => {
                self.map.insert(
                    key,
                    RelationMeta {
                        referring_tld: relation.referring_tld,
                        country: relation.country,
                    },
                );
                true
            }
        }
    }

    pub fn merge(&mut self, other: RelationSet) {
        for relation in other.iter() {
            self.insert(relation);
        }
    }

    pub fn contains(&self, referring_domain: &str, project_id: &str) -> bool {
        self.map
            .contains_key(&(referring_domain.to_string(), project_id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Relations in (referring_domain, project_id) order.
    pub fn iter(&self) -> impl Iterator<Item = LinkRelation> + '_ {
        self.map.iter().map(|((domain, project), meta)| LinkRelation {
            referring_domain: domain.clone(),
            referring_tld: meta.referring_tld.clone(),
            project_id: project.clone(),
            country: meta.country.clone(),
        })
    }

    pub fn filtered<F: FnMut(&LinkRelation) -> bool>(&self, mut keep: F) -> RelationSet {
        let mut out = RelationSet::new();
        for relation in self.iter() {
            if keep(&relation) {
                out.insert(relation);
            }
        }
        out
    }

    /// Number of distinct referring domains across the whole set.
    pub fn distinct_referring_domains(&self) -> usize {
        let mut count = 0;
        let mut last: Option<&str> = None;
        for (domain, _) in self.map.keys() {
            if last != Some(domain.as_str()) {
                count += 1;
                last = Some(domain.as_str());
            }
        }
        count
    }
}

impl FromIterator<LinkRelation> for RelationSet {
    fn from_iter<T: IntoIterator<Item = LinkRelation>>(iter: T) -> Self {
        let mut set = RelationSet::new();
        for relation in iter {
            set.insert(relation);
        }
        set
    }
}

fn merge_country(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}
