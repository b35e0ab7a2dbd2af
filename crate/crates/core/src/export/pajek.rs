//! Pajek .net files: a `*Vertices n` section with quoted labels followed by
//! a `*Edges` section of `a b w` rows, all ids 1-based.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExportError, NetworkDocument, NetworkEdge, NetworkNode};

/// Labels with embedded double quotes are rejected rather than escaped:
/// Pajek dialects disagree on escaping, so we refuse to guess.
pub fn write_pajek(doc: &NetworkDocument, path: &Path) -> Result<(), ExportError> {
    let mut out = String::new();
    writeln!(out, "*Vertices {}", doc.nodes.len()).expect("writing to a String cannot fail");
    for node in &doc.nodes {
        if node.label.contains(['"', '\n', '\r']) {
            return Err(ExportError::InvalidLabel {
                label: node.label.clone(),
                format: "pajek",
            });
        }
        writeln!(out, "{} \"{}\"", node.id, node.label).expect("writing to a String cannot fail");
    }
    out.push_str("*Edges\n");
    for edge in &doc.edges {
        writeln!(out, "{} {} {}", edge.a, edge.b, edge.strength)
            .expect("writing to a String cannot fail");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads the subset of Pajek this module writes. Cluster and weight
/// information is not part of the format; nodes come back with cluster 0
/// and weights recomputed from incident strengths.
pub fn read_pajek(path: &Path) -> Result<NetworkDocument, ExportError> {
    let text = std::fs::read_to_string(path)?;
    let mut nodes: Vec<NetworkNode> = Vec::new();
    let mut edges: Vec<NetworkEdge> = Vec::new();
    let mut expected_vertices = 0usize;
    let mut in_edges = false;
    let mut seen_vertices_header = false;

    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('*') {
            let lower = rest.to_lowercase();
            if let Some(count) = lower.strip_prefix("vertices") {
                expected_vertices = count.trim().parse().map_err(|_| {
                    ExportError::malformed(path, line_no, format!("bad vertex count {rest:?}"))
                })?;
                seen_vertices_header = true;
            } else if lower == "edges" || lower == "arcs" {
                in_edges = true;
            } else {
                return Err(ExportError::malformed(
                    path,
                    line_no,
                    format!("unknown section *{rest}"),
                ));
            }
            continue;
        }
        if !seen_vertices_header {
            return Err(ExportError::malformed(path, line_no, "data before *Vertices"));
        }
        if in_edges {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let [a, b, w] = fields.as_slice() else {
                return Err(ExportError::malformed(
                    path,
                    line_no,
                    format!("expected `a b w`, got {trimmed:?}"),
                ));
            };
            let parse = |value: &str| {
                value.parse::<u64>().map_err(|_| {
                    ExportError::malformed(path, line_no, format!("bad number {value:?}"))
                })
            };
            edges.push(NetworkEdge {
                a: parse(a)? as u32,
                b: parse(b)? as u32,
                strength: parse(w)?,
            });
        } else {
            let (id_part, rest) = trimmed.split_once(' ').ok_or_else(|| {
                ExportError::malformed(path, line_no, format!("expected `id \"label\"`, got {trimmed:?}"))
            })?;
            let id = id_part.parse::<u32>().map_err(|_| {
                ExportError::malformed(path, line_no, format!("bad vertex id {id_part:?}"))
            })?;
            let label = rest
                .trim()
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .ok_or_else(|| {
                    ExportError::malformed(path, line_no, format!("label not quoted: {rest:?}"))
                })?;
            nodes.push(NetworkNode {
                id,
                label: label.to_string(),
                cluster: 0,
                weight: 0,
            });
        }
    }
    if nodes.len() != expected_vertices {
        return Err(ExportError::malformed(
            path,
            1,
            format!("*Vertices says {expected_vertices}, found {}", nodes.len()),
        ));
    }
    for edge in &edges {
        for id in [edge.a, edge.b] {
            if id == 0 || id as usize > nodes.len() {
                return Err(ExportError::malformed(
                    path,
                    1,
                    format!("edge references unknown vertex {id}"),
                ));
            }
        }
        nodes[edge.a as usize - 1].weight += edge.strength;
        nodes[edge.b as usize - 1].weight += edge.strength;
    }
    Ok(NetworkDocument { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> NetworkDocument {
        NetworkDocument {
            nodes: vec![
                NetworkNode { id: 1, label: "x".into(), cluster: 1, weight: 2 },
                NetworkNode { id: 2, label: "y".into(), cluster: 1, weight: 2 },
                NetworkNode { id: 3, label: "z".into(), cluster: 1, weight: 2 },
            ],
            edges: vec![
                NetworkEdge { a: 1, b: 2, strength: 1 },
                NetworkEdge { a: 1, b: 3, strength: 1 },
                NetworkEdge { a: 2, b: 3, strength: 1 },
            ],
        }
    }

    #[test]
    fn triangle_bytes_are_pinned() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.paj");
        write_pajek(&doc(), &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "*Vertices 3\n1 \"x\"\n2 \"y\"\n3 \"z\"\n*Edges\n1 2 1\n1 3 1\n2 3 1\n"
        );
    }

    #[test]
    fn round_trip_preserves_structure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.paj");
        write_pajek(&doc(), &path).unwrap();
        let back = read_pajek(&path).unwrap();
        // Cluster indices are not representable in Pajek; compare the rest.
        assert_eq!(back.edges, doc().edges);
        assert_eq!(
            back.nodes.iter().map(|n| (n.id, n.label.as_str(), n.weight)).collect::<Vec<_>>(),
            doc().nodes.iter().map(|n| (n.id, n.label.as_str(), n.weight)).collect::<Vec<_>>(),
        );
        // Write -> read -> write is a byte fixed point.
        let path2 = dir.path().join("t2.paj");
        write_pajek(&back, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn quote_in_label_is_rejected() {
        let mut bad = doc();
        bad.nodes[0].label = "quo\"te".into();
        let dir = tempfile::tempdir().unwrap();
        let err = write_pajek(&bad, &dir.path().join("bad.paj")).unwrap_err();
        assert!(matches!(err, ExportError::InvalidLabel { .. }));
    }

    #[test]
    fn labels_with_spaces_survive() {
        let mut spaced = doc();
        spaced.nodes[0].label = "two words".into();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.paj");
        write_pajek(&spaced, &path).unwrap();
        let back = read_pajek(&path).unwrap();
        assert_eq!(back.nodes[0].label, "two words");
    }

    #[test]
    fn vertex_count_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.paj");
        std::fs::write(&path, "*Vertices 2\n1 \"x\"\n*Edges\n").unwrap();
        assert!(matches!(read_pajek(&path), Err(ExportError::Malformed { .. })));
    }
}
