//! Seeded modularity clustering for co-occurrence networks.
//!
//! A multi-level local-moving optimizer in the Louvain style: nodes start
//! as singletons, greedy moves chase modularity gains, communities collapse
//! into super-nodes, and the process repeats until a full level brings no
//! improvement. Runs are deterministic for a fixed (seed, restarts) pair;
//! the best restart by modularity wins.
//!
//! The quality function is Q = Σ_c [l_c/m - γ(d_c/2m)²] with resolution γ,
//! intra-community weight l_c, community degree sum d_c and total edge
//! weight m. For γ > 0 merging disjoint components strictly lowers Q, so
//! components never fuse; nodes without edges keep singleton clusters.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::CoOccurrenceMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("cannot cluster an empty network")]
    EmptyNetwork,
}

/// A co-occurrence matrix plus the cluster assignment computed for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredNetwork {
    pub matrix: CoOccurrenceMatrix,
    /// Node label to 1-based cluster index, contiguous, numbered by first
    /// occurrence in `matrix.node_ids` order.
    pub cluster_of: BTreeMap<String, u32>,
    pub modularity: f64,
    pub resolution: f64,
    pub seed: u64,
    pub restarts: u32,
}

impl ClusteredNetwork {
    pub fn cluster_count(&self) -> u32 {
        self.cluster_of.values().copied().max().unwrap_or(0)
    }

    /// Cluster index per node, aligned with `matrix.node_ids`.
    pub fn assignments(&self) -> Vec<u32> {
        self.matrix
            .node_ids
            .iter()
            .map(|label| self.cluster_of[label])
            .collect()
    }
}

/// Modularity of a partition, where `partition[i]` is the community of
/// `matrix.node_ids[i]`. Exposed so optimality can be checked externally.
///
/// Edgeless networks have no defined null model; their modularity is 0.
pub fn modularity(matrix: &CoOccurrenceMatrix, partition: &[u32], resolution: f64) -> f64 {
    assert_eq!(partition.len(), matrix.node_count(), "partition size mismatch");
    let m: u64 = matrix.total_weight();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let mut intra: BTreeMap<u32, f64> = BTreeMap::new();
    let mut degree: BTreeMap<u32, f64> = BTreeMap::new();
    for (&(i, j), &w) in &matrix.weights {
        let w = w as f64;
        if partition[i as usize] == partition[j as usize] {
            *intra.entry(partition[i as usize]).or_insert(0.0) += w;
        }
        *degree.entry(partition[i as usize]).or_insert(0.0) += w;
        *degree.entry(partition[j as usize]).or_insert(0.0) += w;
    }
    degree
        .iter()
        .map(|(community, d)| {
            let l = intra.get(community).copied().unwrap_or(0.0);
            l / m - resolution * (d / (2.0 * m)).powi(2)
        })
        .sum()
}

/// Clusters the matrix, returning the best partition over `restarts`
/// seeded runs. Deterministic for fixed inputs.
pub fn cluster_network(
    matrix: &CoOccurrenceMatrix,
    resolution: f64,
    seed: u64,
    restarts: u32,
) -> Result<ClusteredNetwork, ClusterError> {
    if matrix.node_count() == 0 {
        return Err(ClusterError::EmptyNetwork);
    }
    assert!(resolution > 0.0, "resolution must be positive");

    let mut best: Option<(f64, Vec<u32>)> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let partition = louvain(matrix, resolution, &mut rng);
        let q = modularity(matrix, &partition, resolution);
        // Strictly-better keeps the earliest restart on ties, so results
        // never depend on float tie ordering.
        if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
            best = Some((q, partition));
        }
    }
    let (q, partition) = best.expect("at least one restart ran");
    let canonical = renumber_by_first_occurrence(&partition);
    Ok(ClusteredNetwork {
        matrix: matrix.clone(),
        cluster_of: matrix
            .node_ids
            .iter()
            .zip(&canonical)
            .map(|(label, &c)| (label.clone(), c))
            .collect(),
        modularity: q,
        resolution,
        seed,
        restarts,
    })
}

/// One aggregation level: nodes, symmetric edges, self-loops from collapsed
/// communities.
struct LevelGraph {
    /// Adjacency as (neighbor, weight) lists; no self entries.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Self-loop weight per node (collapsed intra-community weight).
    self_loops: Vec<f64>,
    /// Degree per node: incident edge weights plus twice the self-loop.
    degrees: Vec<f64>,
    /// Total edge weight m, self-loops included once.
    total_weight: f64,
}

impl LevelGraph {
    fn from_matrix(matrix: &CoOccurrenceMatrix) -> Self {
        let n = matrix.node_count();
        let mut adjacency = vec![Vec::new(); n];
        let mut degrees = vec![0.0; n];
        let mut total = 0.0;
        for (&(i, j), &w) in &matrix.weights {
            let (i, j, w) = (i as usize, j as usize, w as f64);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
            degrees[i] += w;
            degrees[j] += w;
            total += w;
        }
        Self {
            adjacency,
            self_loops: vec![0.0; n],
            degrees,
            total_weight: total,
        }
    }

    fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Collapses communities into super-nodes. `community[i]` must be
    /// contiguous from 0.
    fn aggregate(&self, community: &[usize], community_count: usize) -> LevelGraph {
        let mut edge_weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut self_loops = vec![0.0; community_count];
        for (node, neighbors) in self.adjacency.iter().enumerate() {
            let a = community[node];
            for &(neighbor, w) in neighbors {
                if neighbor <= node {
                    continue; // visit each undirected edge once
                }
                let b = community[neighbor];
                if a == b {
                    self_loops[a] += w;
                } else {
                    let key = (a.min(b), a.max(b));
                    *edge_weights.entry(key).or_insert(0.0) += w;
                }
            }
        }
        for (node, &loop_weight) in self.self_loops.iter().enumerate() {
            self_loops[community[node]] += loop_weight;
        }
        let mut adjacency = vec![Vec::new(); community_count];
        let mut degrees = vec![0.0; community_count];
        let mut total = 0.0;
        for (&(a, b), &w) in &edge_weights {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
            degrees[a] += w;
            degrees[b] += w;
            total += w;
        }
        for (node, &loop_weight) in self_loops.iter().enumerate() {
            degrees[node] += 2.0 * loop_weight;
            total += loop_weight;
        }
        LevelGraph {
            adjacency,
            self_loops,
            degrees,
            total_weight: total,
        }
    }
}

/// Local moving at one level. Returns the community of each node,
/// contiguous from 0, and whether any node moved at all.
fn local_moving(graph: &LevelGraph, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
    let n = graph.node_count();
    let m = graph.total_weight;
    let mut community: Vec<usize> = (0..n).collect();
    let mut community_degree: Vec<f64> = graph.degrees.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut moved_any = false;
    if m > 0.0 {
        loop {
            let mut moved_this_pass = false;
            for &node in &order {
                let current = community[node];
                let k = graph.degrees[node];
                community_degree[current] -= k;

                // Weight from node into each neighboring community.
                let mut into: BTreeMap<usize, f64> = BTreeMap::new();
                into.insert(current, 0.0);
                for &(neighbor, w) in &graph.adjacency[node] {
                    *into.entry(community[neighbor]).or_insert(0.0) += w;
                }

                // gain(c) = k_into_c/m - γ·k·d_c/(2m²); staying counts too.
                // Only strict improvement moves a node, and candidates
                // iterate in ascending id order, so ties resolve to the
                // lowest community deterministically.
                let mut best_community = current;
                let mut best_gain = gain(into[&current], k, community_degree[current], m, resolution);
                for (&candidate, &k_into) in &into {
                    if candidate == current {
                        continue;
                    }
                    let g = gain(k_into, k, community_degree[candidate], m, resolution);
                    if g > best_gain + 1e-12 {
                        best_gain = g;
                        best_community = candidate;
                    }
                }

                community_degree[best_community] += k;
                if best_community != current {
                    community[node] = best_community;
                    moved_this_pass = true;
                    moved_any = true;
                }
            }
            if !moved_this_pass {
                break;
            }
        }
    }

    // Renumber communities contiguously from 0.
    let mut next = 0usize;
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &mut community {
        let id = *map.entry(*c).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        *c = id;
    }
    (community, next, moved_any)
}

fn gain(k_into: f64, k: f64, community_degree_without_node: f64, m: f64, resolution: f64) -> f64 {
    k_into / m - resolution * k * community_degree_without_node / (2.0 * m * m)
}

fn louvain(matrix: &CoOccurrenceMatrix, resolution: f64, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut graph = LevelGraph::from_matrix(matrix);
    // assignment[i] = current community of original node i.
    let mut assignment: Vec<usize> = (0..matrix.node_count()).collect();

    loop {
        let (community, community_count, moved) = local_moving(&graph, resolution, rng);
        for slot in &mut assignment {
            *slot = community[*slot];
        }
        if !moved || community_count == graph.node_count() {
            break;
        }
        graph = graph.aggregate(&community, community_count);
    }
    assignment.iter().map(|&c| c as u32).collect()
}

/// Renumbers arbitrary community ids to 1-based contiguous ids in order of
/// first appearance.
fn renumber_by_first_occurrence(partition: &[u32]) -> Vec<u32> {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next = 1u32;
    partition
        .iter()
        .map(|&c| {
            *map.entry(c).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn matrix(n: usize, edges: &[(u32, u32, u64)]) -> CoOccurrenceMatrix {
        CoOccurrenceMatrix {
            node_ids: (0..n).map(|i| format!("n{i:02}")).collect(),
            weights: edges.iter().map(|&(i, j, w)| ((i, j), w)).collect(),
        }
    }

    /// All set partitions of {0..n}, as community vectors in restricted
    /// growth form (first occurrence order, ids from 0).
    fn all_partitions(n: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        fn recurse(current: &mut Vec<u32>, index: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
            if index == current.len() {
                out.push(current.clone());
                return;
            }
            for c in 0..=max_used + 1 {
                current[index] = c;
                recurse(current, index + 1, max_used.max(c), out);
            }
        }
        if n > 0 {
            recurse(&mut current, 1, 0, &mut out);
        } else {
            out.push(Vec::new());
        }
        out
    }

    fn two_triangles() -> CoOccurrenceMatrix {
        matrix(
            6,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (1, 2, 1),
                (3, 4, 1),
                (3, 5, 1),
                (4, 5, 1),
            ],
        )
    }

    #[test]
    fn partition_enumeration_matches_bell_numbers() {
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(all_partitions(6).len(), 203);
    }

    #[test]
    fn two_triangles_split_into_two_optimal_clusters() {
        let m = two_triangles();
        let clustered = cluster_network(&m, 1.0, 42, 10).unwrap();
        assert_eq!(clustered.cluster_count(), 2);
        let got = clustered.assignments();
        assert_eq!(got[0], got[1]);
        assert_eq!(got[0], got[2]);
        assert_eq!(got[3], got[4]);
        assert_eq!(got[3], got[5]);
        assert_ne!(got[0], got[3]);

        // Exhaustive search over all 203 partitions of 6 nodes confirms the
        // optimizer found the global optimum.
        let best = all_partitions(6)
            .into_iter()
            .map(|p| modularity(&m, &p, 1.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((clustered.modularity - best).abs() < 1e-12);
        assert!((clustered.modularity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_collapses_to_one_cluster() {
        let m = matrix(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]);
        let clustered = cluster_network(&m, 1.0, 42, 10).unwrap();
        assert_eq!(clustered.cluster_count(), 1);
        let best = all_partitions(4)
            .into_iter()
            .map(|p| modularity(&m, &p, 1.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((clustered.modularity - best).abs() < 1e-12);
        assert!(clustered.modularity.abs() < 1e-12); // K4 at γ=1 peaks at 0
    }

    #[test]
    fn single_node_gets_cluster_one() {
        let m = matrix(1, &[]);
        let clustered = cluster_network(&m, 1.0, 42, 3).unwrap();
        assert_eq!(clustered.cluster_count(), 1);
        assert_eq!(clustered.cluster_of["n00"], 1);
    }

    #[test]
    fn empty_network_is_an_error() {
        let m = matrix(0, &[]);
        assert_eq!(
            cluster_network(&m, 1.0, 42, 3).unwrap_err(),
            ClusterError::EmptyNetwork
        );
    }

    #[test]
    fn isolated_nodes_stay_singletons() {
        // One edge plus two isolated nodes.
        let m = matrix(4, &[(0, 1, 3)]);
        let clustered = cluster_network(&m, 1.0, 42, 5).unwrap();
        let got = clustered.assignments();
        assert_eq!(got[0], got[1]);
        assert_ne!(got[2], got[0]);
        assert_ne!(got[3], got[0]);
        assert_ne!(got[2], got[3]);
    }

    #[test]
    fn deterministic_for_fixed_seed_and_restarts() {
        let m = two_triangles();
        let a = cluster_network(&m, 1.0, 7, 4).unwrap();
        let b = cluster_network(&m, 1.0, 7, 4).unwrap();
        assert_eq!(a, b);
        let c = cluster_network(&m, 1.0, 8, 4).unwrap();
        // A different seed may find the same partition; modularity of the
        // best restart still has to match on this easy instance.
        assert!((a.modularity - c.modularity).abs() < 1e-12);
    }

    #[test]
    fn cluster_ids_contiguous_from_one_by_first_occurrence() {
        let m = two_triangles();
        let clustered = cluster_network(&m, 1.0, 42, 10).unwrap();
        let got = clustered.assignments();
        assert_eq!(got[0], 1); // first node always opens cluster 1
        let seen: BTreeSet<u32> = got.iter().copied().collect();
        assert_eq!(seen, (1..=clustered.cluster_count()).collect());
    }

    fn arb_matrix() -> impl Strategy<Value = CoOccurrenceMatrix> {
        (2usize..8).prop_flat_map(|n| {
            prop::collection::btree_map(
                (0u32..n as u32, 0u32..n as u32)
                    .prop_filter_map("no self pairs", |(a, b)| {
                        (a != b).then(|| (a.min(b), a.max(b)))
                    }),
                1u64..5,
                0..n * 2,
            )
            .prop_map(move |weights| CoOccurrenceMatrix {
                node_ids: (0..n).map(|i| format!("n{i:02}")).collect(),
                weights,
            })
        })
    }

    proptest! {
        // Modest case count: each case runs an exhaustive partition search.
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn optimizer_reaches_exhaustive_optimum_on_small_graphs(m in arb_matrix()) {
            let clustered = cluster_network(&m, 1.0, 42, 12).unwrap();
            let best = all_partitions(m.node_count())
                .into_iter()
                .map(|p| modularity(&m, &p, 1.0))
                .fold(f64::NEG_INFINITY, f64::max);
            // Louvain is a heuristic; with 12 restarts on ≤ 7 nodes it
            // reliably lands on the optimum. Tolerance only covers float
            // noise, not a quality gap.
            prop_assert!(
                clustered.modularity >= best - 1e-9,
                "got {}, optimum {}",
                clustered.modularity,
                best
            );
        }

        #[test]
        fn every_node_is_assigned_exactly_once(m in arb_matrix()) {
            let clustered = cluster_network(&m, 1.0, 1, 3).unwrap();
            prop_assert_eq!(clustered.cluster_of.len(), m.node_count());
            let count = clustered.cluster_count();
            for c in clustered.cluster_of.values() {
                prop_assert!((1..=count).contains(c));
            }
        }

        #[test]
        fn disjoint_components_never_merge(
            seed in 0u64..500,
            left_n in 2usize..5,
            right_n in 2usize..5,
        ) {
            // Two complete components with no cross edges.
            let mut edges = Vec::new();
            for i in 0..left_n as u32 {
                for j in (i + 1)..left_n as u32 {
                    edges.push((i, j, 1));
                }
            }
            let offset = left_n as u32;
            for i in 0..right_n as u32 {
                for j in (i + 1)..right_n as u32 {
                    edges.push((offset + i, offset + j, 1));
                }
            }
            let m = matrix(left_n + right_n, &edges);
            let clustered = cluster_network(&m, 1.0, seed, 2).unwrap();
            let got = clustered.assignments();
            let left: BTreeSet<u32> = got[..left_n].iter().copied().collect();
            let right: BTreeSet<u32> = got[left_n..].iter().copied().collect();
            prop_assert!(left.is_disjoint(&right), "components merged: {got:?}");
        }
    }
}
