use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use thiserror::Error;

use crate::domain::{normalize_host, split_domain, SuffixRuleSet};
use crate::ingest::{LinkRelation, Portfolio, RelationSet};

const BACKLINK_HEADER: [&str; 4] = ["source_url", "target_project", "provider_country", "crawl_date"];

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("backlink file not found: {path}")]
    FileNotFound { path: String },
    #[error("cannot read backlink file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("backlink header must be \"source_url,target_project,provider_country,crawl_date\", found {found:?}")]
    SchemaMismatch { found: String },
}

/// Counters for one CSV import. Per-row failures never abort the import;
/// they are tallied here instead.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImportStats {
    pub rows_read: usize,
    pub rows_rejected: usize,
    pub self_links_dropped: usize,
    pub relations_emitted: usize,
    /// Fraction of successfully parsed rows that collapsed into an already
    /// emitted (referring_domain, project) pair.
    pub dedup_ratio: f64,
}

impl fmt::Display for ImportStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows read: {}, rejected: {}, self-links dropped: {}, relations emitted: {}, dedup ratio: {:.3}",
            self.rows_read,
            self.rows_rejected,
            self.self_links_dropped,
            self.relations_emitted,
            self.dedup_ratio
        )
    }
}

/// Imports a backlink CSV export and reduces it to deduplicated referring
/// domain relations.
///
/// Every row is reduced via [`normalize_host`] + [`split_domain`]; rows that
/// collapse to the same (referring_domain, project) pair emit one relation.
/// Rows that fail to parse, reference an unknown project, or carry a
/// malformed crawl date are counted as rejected. Links from a project's own
/// domain to itself are dropped.
pub fn import_backlinks_csv(
    path: &Path,
    portfolio: &Portfolio,
    rules: &SuffixRuleSet,
) -> Result<(RelationSet, ImportStats), ImportError> {
    if !path.exists() {
        return Err(ImportError::FileNotFound {
            path: path.display().to_string(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| ImportError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        })?;

    let headers = reader.headers().map_err(|e| ImportError::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
    })?;
    if headers.iter().collect::<Vec<_>>() != BACKLINK_HEADER {
        return Err(ImportError::SchemaMismatch {
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut relations = RelationSet::new();
    let mut stats = ImportStats::default();
    let mut parsed_ok = 0usize;

    for record in reader.records() {
        stats.rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                stats.rows_rejected += 1;
                continue;
            }
        };
        match reduce_row(&record, portfolio, rules) {
            RowOutcome::Relation(relation) => {
                parsed_ok += 1;
                if relations.insert(relation) {
                    stats.relations_emitted += 1;
                }
            }
            RowOutcome::SelfLink => stats.self_links_dropped += 1,
            RowOutcome::Rejected => stats.rows_rejected += 1,
        }
    }

    stats.dedup_ratio = if parsed_ok == 0 {
        0.0
    } else {
        (parsed_ok - stats.relations_emitted) as f64 / parsed_ok as f64
    };
    Ok((relations, stats))
}

enum RowOutcome {
    Relation(LinkRelation),
    SelfLink,
    Rejected,
}

fn reduce_row(record: &csv::StringRecord, portfolio: &Portfolio, rules: &SuffixRuleSet) -> RowOutcome {
    if record.len() < 2 || record.len() > 4 {
        return RowOutcome::Rejected;
    }
    let source_url = record.get(0).unwrap_or("");
    let target_project = record.get(1).unwrap_or("").trim();

    let Some(project) = portfolio.get(target_project) else {
        return RowOutcome::Rejected;
    };
    let Ok(host) = normalize_host(source_url) else {
        return RowOutcome::Rejected;
    };
    let Ok(parsed) = split_domain(&host, rules) else {
        return RowOutcome::Rejected;
    };
    let crawl_date = record.get(3).map(str::trim).unwrap_or("");
    if !crawl_date.is_empty() && NaiveDate::parse_from_str(crawl_date, "%Y-%m-%d").is_err() {
        return RowOutcome::Rejected;
    }

    if parsed.root_domain == project.root_domain {
        return RowOutcome::SelfLink;
    }

    RowOutcome::Relation(LinkRelation {
        referring_domain: parsed.root_domain,
        referring_tld: parsed.public_suffix,
        project_id: project.project_id.clone(),
        country: clean_country(record.get(2).unwrap_or("")),
    })
}

/// Provider country codes are recorded as given, uppercased; anything that
/// could not travel through the snapshot CSV unescaped is discarded.
fn clean_country(raw: &str) -> Option<String> {
    let token = raw.trim().to_uppercase();
    if token.is_empty() || token.len() > 16 {
        return None;
    }
    if token
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_'))
    {
        Some(token)
    } else {
        None
    }
}
