use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{LinkRelation, RelationSet};

pub const RELATIONS_FILE: &str = "relations.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
const SNAPSHOT_HEADER: &str = "referring_domain,referring_tld,project_id,country";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot io error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("snapshot relations file is malformed at line {line_no}: {reason}")]
    Malformed { line_no: usize, reason: String },
    #[error("snapshot manifest does not match relations file: {reason}")]
    Corrupt { reason: String },
}

/// Deterministic description of a written snapshot. Contains no wall-clock
/// fields so that writing the same relation set twice is byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub snapshot_date: NaiveDate,
    pub relation_count: usize,
    pub distinct_referring_domains: usize,
    pub project_count: usize,
    /// SHA-256 of the relations CSV, hex-encoded.
    pub relations_sha256: String,
}

/// Writes `relations.csv` (sorted) and `manifest.json` into `dir`.
pub fn snapshot_write(
    relations: &RelationSet,
    snapshot_date: NaiveDate,
    dir: &Path,
) -> Result<SnapshotManifest, SnapshotError> {
    let io_err = |path: &Path, source: std::io::Error| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut csv_text = String::from(SNAPSHOT_HEADER);
    csv_text.push('\n');
    let mut projects = std::collections::BTreeSet::new();
    for relation in relations.iter() {
        csv_text.push_str(&format!(
            "{},{},{},{}\n",
            relation.referring_domain,
            relation.referring_tld,
            relation.project_id,
            relation.country.as_deref().unwrap_or("")
        ));
        projects.insert(relation.project_id);
    }

    let relations_path = dir.join(RELATIONS_FILE);
    std::fs::write(&relations_path, &csv_text).map_err(|e| io_err(&relations_path, e))?;

    let manifest = SnapshotManifest {
        snapshot_date,
        relation_count: relations.len(),
        distinct_referring_domains: relations.distinct_referring_domains(),
        project_count: projects.len(),
        relations_sha256: hex_digest(csv_text.as_bytes()),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut manifest_json =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_json.push('\n');
    std::fs::write(&manifest_path, manifest_json).map_err(|e| io_err(&manifest_path, e))?;
    Ok(manifest)
}

/// Reads a snapshot back, verifying the manifest digest and counts.
pub fn snapshot_read(dir: &Path) -> Result<(RelationSet, SnapshotManifest), SnapshotError> {
    let relations_path = dir.join(RELATIONS_FILE);
    let csv_text = std::fs::read_to_string(&relations_path).map_err(|e| SnapshotError::Io {
        path: relations_path.display().to_string(),
        source: e,
    })?;
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text = std::fs::read_to_string(&manifest_path).map_err(|e| SnapshotError::Io {
        path: manifest_path.display().to_string(),
        source: e,
    })?;
    let manifest: SnapshotManifest =
        serde_json::from_str(&manifest_text).map_err(|e| SnapshotError::Corrupt {
            reason: format!("manifest does not parse: {e}"),
        })?;

    if manifest.relations_sha256 != hex_digest(csv_text.as_bytes()) {
        return Err(SnapshotError::Corrupt {
            reason: "relations digest mismatch".into(),
        });
    }

    let mut lines = csv_text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SNAPSHOT_HEADER => {}
        other => {
            return Err(SnapshotError::Malformed {
                line_no: 1,
                reason: format!("bad header {:?}", other.map(|(_, h)| h)),
            })
        }
    }

    let mut relations = RelationSet::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(SnapshotError::Malformed {
                line_no: idx + 1,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        relations.insert(LinkRelation {
            referring_domain: fields[0].to_string(),
            referring_tld: fields[1].to_string(),
            project_id: fields[2].to_string(),
            country: if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].to_string())
            },
        });
    }

    if relations.len() != manifest.relation_count {
        return Err(SnapshotError::Corrupt {
            reason: format!(
                "manifest claims {} relations, file holds {}",
                manifest.relation_count,
                relations.len()
            ),
        });
    }
    Ok((relations, manifest))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}
