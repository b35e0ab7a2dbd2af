//! VOSviewer map and network files.
//!
//! The map file is tab-separated with the header
//! `id<TAB>label<TAB>cluster<TAB>weight<Links>`, one row per node. The
//! network file has no header; each row is `id<TAB>id<TAB>strength`.
//! Coordinates are deliberately absent: layout is VOSviewer's job.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExportError, NetworkDocument, NetworkEdge, NetworkNode};

const MAP_HEADER: &str = "id\tlabel\tcluster\tweight<Links>";

pub fn write_vosviewer(
    doc: &NetworkDocument,
    map_path: &Path,
    net_path: &Path,
) -> Result<(), ExportError> {
    let mut map = String::new();
    map.push_str(MAP_HEADER);
    map.push('\n');
    for node in &doc.nodes {
        if node.label.contains(['\t', '\n', '\r']) {
            return Err(ExportError::InvalidLabel {
                label: node.label.clone(),
                format: "vosviewer map",
            });
        }
        writeln!(map, "{}\t{}\t{}\t{}", node.id, node.label, node.cluster, node.weight)
            .expect("writing to a String cannot fail");
    }
    let mut net = String::new();
    for edge in &doc.edges {
        writeln!(net, "{}\t{}\t{}", edge.a, edge.b, edge.strength)
            .expect("writing to a String cannot fail");
    }
    std::fs::write(map_path, map)?;
    std::fs::write(net_path, net)?;
    Ok(())
}

pub fn read_vosviewer(map_path: &Path, net_path: &Path) -> Result<NetworkDocument, ExportError> {
    let map_text = std::fs::read_to_string(map_path)?;
    let mut lines = map_text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == MAP_HEADER => {}
        Some((_, header)) => {
            return Err(ExportError::malformed(
                map_path,
                1,
                format!("unexpected header {header:?}"),
            ))
        }
        None => return Err(ExportError::malformed(map_path, 1, "empty map file")),
    }
    let mut nodes = Vec::new();
    for (index, line) in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, label, cluster, weight] = fields.as_slice() else {
            return Err(ExportError::malformed(
                map_path,
                index + 1,
                format!("expected 4 tab-separated fields, got {}", fields.len()),
            ));
        };
        let parse = |what, value: &str| {
            value.parse::<u64>().map_err(|_| {
                ExportError::malformed(map_path, index + 1, format!("bad {what}: {value:?}"))
            })
        };
        nodes.push(NetworkNode {
            id: parse("id", id)? as u32,
            label: label.to_string(),
            cluster: parse("cluster", cluster)? as u32,
            weight: parse("weight", weight)?,
        });
    }

    let net_text = std::fs::read_to_string(net_path)?;
    let mut edges = Vec::new();
    for (index, line) in net_text.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        let [a, b, strength] = fields.as_slice() else {
            return Err(ExportError::malformed(
                net_path,
                index + 1,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        };
        let parse = |what, value: &str| {
            value.parse::<u64>().map_err(|_| {
                ExportError::malformed(net_path, index + 1, format!("bad {what}: {value:?}"))
            })
        };
        edges.push(NetworkEdge {
            a: parse("id", a)? as u32,
            b: parse("id", b)? as u32,
            strength: parse("strength", strength)?,
        });
    }
    Ok(NetworkDocument { nodes, edges })
}
