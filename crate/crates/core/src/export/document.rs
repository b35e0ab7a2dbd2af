use crate::cluster::ClusteredNetwork;

/// Flattened network ready for serialization: nodes carry contiguous
/// 1-based ids assigned from sorted labels, edges reference those ids with
/// the lower id first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkDocument {
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkNode {
    pub id: u32,
    pub label: String,
    pub cluster: u32,
    /// Sum of incident edge strengths; zero for isolated nodes.
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkEdge {
    pub a: u32,
    pub b: u32,
    pub strength: u64,
}

/// Converts a clustered network into its document form.
///
/// Ids are assigned at export time from the sorted label list and never
/// persisted, so re-exports stay stable per label even after node
/// additions elsewhere in the portfolio.
pub fn to_network_document(cn: &ClusteredNetwork) -> NetworkDocument {
    let mut order: Vec<usize> = (0..cn.matrix.node_ids.len()).collect();
    order.sort_by(|&a, &b| cn.matrix.node_ids[a].cmp(&cn.matrix.node_ids[b]));
    // id_of[matrix_index] = 1-based document id
    let mut id_of = vec![0u32; order.len()];
    for (position, &matrix_index) in order.iter().enumerate() {
        id_of[matrix_index] = position as u32 + 1;
    }

    let strengths = cn.matrix.strengths();
    let nodes = order
        .iter()
        .map(|&matrix_index| {
            let label = &cn.matrix.node_ids[matrix_index];
            NetworkNode {
                id: id_of[matrix_index],
                label: label.clone(),
                cluster: cn.cluster_of[label],
                weight: strengths[matrix_index],
            }
        })
        .collect();

    let mut edges: Vec<NetworkEdge> = cn
        .matrix
        .weights
        .iter()
        .map(|(&(i, j), &w)| {
            let (a, b) = (id_of[i as usize], id_of[j as usize]);
            NetworkEdge {
                a: a.min(b),
                b: a.max(b),
                strength: w,
            }
        })
        .collect();
    edges.sort_by_key(|e| (e.a, e.b));
    NetworkDocument { nodes, edges }
}
