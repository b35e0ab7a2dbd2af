//! Co-occurrence networks over the shared referrer structure.
//!
//! Relations form a bipartite graph: referring domains on the left,
//! portfolio projects on the right. Projecting it one way connects projects
//! that share referrers (a co-linked relation, the web analog of
//! co-citation); the other way connects referrers that target the same
//! projects (a co-linking relation, the analog of bibliographic coupling).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::filter::{ClassifiedRelation, Origin};
use crate::ingest::Portfolio;

/// Referrer-to-project link structure both projections derive from.
///
/// Left nodes are distinct referring domains, right nodes the portfolio
/// projects, both sorted lexicographically so downstream outputs are
/// byte-deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteIncidence {
    referrers: Vec<String>,
    projects: Vec<String>,
    edges: BTreeSet<(u32, u32)>,
}

/// Which classified relations enter the incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginFilter {
    Internal,
    External,
    Both,
}

impl OriginFilter {
    fn keeps(self, origin: Origin) -> bool {
        match self {
            OriginFilter::Internal => origin == Origin::Internal,
            OriginFilter::External => origin == Origin::External,
            OriginFilter::Both => true,
        }
    }
}

impl BipartiteIncidence {
    /// Builds the incidence directly from index lists.
    ///
    /// Panics when an edge references a missing node or the node lists
    /// contain duplicates; the type's invariants are not negotiable.
    pub fn new(
        mut referrers: Vec<String>,
        mut projects: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        referrers.sort();
        projects.sort();
        assert!(
            referrers.windows(2).all(|w| w[0] != w[1]),
            "duplicate referrer label"
        );
        assert!(
            projects.windows(2).all(|w| w[0] != w[1]),
            "duplicate project label"
        );
        let edges: BTreeSet<(u32, u32)> = edges.into_iter().collect();
        for &(l, r) in &edges {
            assert!((l as usize) < referrers.len(), "edge left index out of range");
            assert!((r as usize) < projects.len(), "edge right index out of range");
        }
        Self {
            referrers,
            projects,
            edges,
        }
    }

    /// One left node per distinct referring domain passing the origin
    /// filter, one right node per portfolio project, one edge per surviving
    /// relation. Duplicate relations collapse into one edge.
    pub fn from_classified(
        classified: &[ClassifiedRelation],
        portfolio: &Portfolio,
        filter: OriginFilter,
    ) -> Self {
        let surviving: Vec<&ClassifiedRelation> = classified
            .iter()
            .filter(|c| filter.keeps(c.origin))
            .collect();
        let referrers: Vec<String> = surviving
            .iter()
            .map(|c| c.relation.referring_domain.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let projects: Vec<String> = portfolio
            .sites()
            .iter()
            .map(|s| s.project_id.clone())
            .collect();
        let referrer_index: BTreeMap<&str, u32> = referrers
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i as u32))
            .collect();
        let project_index: BTreeMap<&str, u32> = projects
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i as u32))
            .collect();
        let edges = surviving
            .iter()
            .filter_map(|c| {
                let l = referrer_index[c.relation.referring_domain.as_str()];
                // Unknown targets cannot come out of ingestion; drop rather
                // than corrupt the index space.
                let r = *project_index.get(c.relation.project_id.as_str())?;
                Some((l, r))
            })
            .collect();
        Self {
            referrers,
            projects,
            edges,
        }
    }

    pub fn referrers(&self) -> &[String] {
        &self.referrers
    }

    pub fn projects(&self) -> &[String] {
        &self.projects
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of projects each referrer links.
    pub fn referrer_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.referrers.len()];
        for &(l, _) in &self.edges {
            degrees[l as usize] += 1;
        }
        degrees
    }

    /// Number of referrers linking each project.
    pub fn project_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0; self.projects.len()];
        for &(_, r) in &self.edges {
            degrees[r as usize] += 1;
        }
        degrees
    }
}

/// Symmetric co-occurrence weights over `node_ids`.
///
/// Keys are index pairs with `i < j`; the diagonal is structurally absent
/// and a missing pair means zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoOccurrenceMatrix {
    pub node_ids: Vec<String>,
    pub weights: BTreeMap<(u32, u32), u64>,
}

impl CoOccurrenceMatrix {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    /// Sum of incident edge weights per node, in `node_ids` order.
    pub fn strengths(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.node_ids.len()];
        for (&(i, j), &w) in &self.weights {
            sums[i as usize] += w;
            sums[j as usize] += w;
        }
        sums
    }

    /// Weights re-keyed by node label, for comparisons across differing
    /// node lists.
    pub fn weights_by_label(&self) -> BTreeMap<(String, String), u64> {
        self.weights
            .iter()
            .map(|(&(i, j), &w)| {
                (
                    (
                        self.node_ids[i as usize].clone(),
                        self.node_ids[j as usize].clone(),
                    ),
                    w,
                )
            })
            .collect()
    }

    fn assert_valid(&self) {
        for (&(i, j), &w) in &self.weights {
            assert!(i < j, "pair ({i},{j}) not in canonical order");
            assert!((j as usize) < self.node_ids.len(), "index out of range");
            assert!(w >= 1, "stored zero weight");
        }
    }
}

/// Projects-by-projects projection: weight{P,Q} counts the referrers
/// linking both P and Q, the off-diagonal of BᵀB.
pub fn colinked_matrix(inc: &BipartiteIncidence) -> CoOccurrenceMatrix {
    let mut neighbor_projects: Vec<Vec<u32>> = vec![Vec::new(); inc.referrers.len()];
    for &(l, r) in &inc.edges {
        neighbor_projects[l as usize].push(r);
    }
    let matrix = CoOccurrenceMatrix {
        node_ids: inc.projects.clone(),
        weights: pair_counts(&neighbor_projects),
    };
    matrix.assert_valid();
    matrix
}

/// Referrers-by-referrers projection: weight{d,e} counts the projects both
/// d and e link, the off-diagonal of BBᵀ.
///
/// Referrers that couple with nobody carry no information and are dropped
/// from `node_ids`; all positive weights are kept, including couplings that
/// involve single-project referrers.
pub fn colinking_matrix(inc: &BipartiteIncidence) -> CoOccurrenceMatrix {
    let mut member_referrers: Vec<Vec<u32>> = vec![Vec::new(); inc.projects.len()];
    for &(l, r) in &inc.edges {
        member_referrers[r as usize].push(l);
    }
    let full = pair_counts(&member_referrers);

    let coupled: BTreeSet<u32> = full.keys().flat_map(|&(a, b)| [a, b]).collect();
    let remap: BTreeMap<u32, u32> = coupled
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let matrix = CoOccurrenceMatrix {
        node_ids: coupled
            .iter()
            .map(|&i| inc.referrers[i as usize].clone())
            .collect(),
        // The remap preserves index order, so pair canonical order survives.
        weights: full
            .into_iter()
            .map(|((a, b), w)| ((remap[&a], remap[&b]), w))
            .collect(),
    };
    matrix.assert_valid();
    matrix
}

/// For each group, increments every unordered pair of its members.
/// Group member lists arrive sorted because edges iterate in order.
fn pair_counts(groups: &[Vec<u32>]) -> BTreeMap<(u32, u32), u64> {
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for members in groups {
        for (offset, &a) in members.iter().enumerate() {
            for &b in &members[offset + 1..] {
                *counts.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    counts.into_iter().collect()
}
