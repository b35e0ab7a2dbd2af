use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{split_domain, SuffixRuleSet};

/// A monitored project website.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectSite {
    /// Stable slug, unique within the portfolio.
    pub project_id: String,
    /// Registrable domain of the project website.
    pub root_domain: String,
    pub start_date: NaiveDate,
    pub end_date: Option<NaiveDate>,
    pub title: String,
}

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("cannot read portfolio file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("portfolio header must be \"project_id,root_domain,start_date,end_date,title\", found {found:?}")]
    SchemaMismatch { found: String },
    #[error("portfolio row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("duplicate project_id {id:?}")]
    DuplicateId { id: String },
}

const PORTFOLIO_HEADER: [&str; 5] = ["project_id", "root_domain", "start_date", "end_date", "title"];

/// The fixed set of monitored project websites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portfolio {
    sites: Vec<ProjectSite>,
    by_id: BTreeMap<String, usize>,
}

impl Portfolio {
    pub fn new(mut sites: Vec<ProjectSite>) -> Result<Self, PortfolioError> {
        sites.sort_by(|a, b| a.project_id.cmp(&b.project_id));
        let mut by_id = BTreeMap::new();
        for (idx, site) in sites.iter().enumerate() {
            validate_site(site, idx + 1)?;
            if by_id.insert(site.project_id.clone(), idx).is_some() {
                return Err(PortfolioError::DuplicateId {
                    id: site.project_id.clone(),
                });
            }
        }
        Ok(Self { sites, by_id })
    }

    /// Loads the portfolio CSV: `project_id,root_domain,start_date,end_date,title`.
    pub fn from_csv_path(path: &Path) -> Result<Self, PortfolioError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| PortfolioError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            })?;
        let headers = reader.headers().map_err(|e| PortfolioError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
        })?;
        if headers.iter().collect::<Vec<_>>() != PORTFOLIO_HEADER {
            return Err(PortfolioError::SchemaMismatch {
                found: headers.iter().collect::<Vec<_>>().join(","),
            });
        }

        let mut sites = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let row = idx + 2; // 1-based, after the header
            let record = record.map_err(|e| PortfolioError::InvalidRow {
                row,
                reason: e.to_string(),
            })?;
            if record.len() != 5 {
                return Err(PortfolioError::InvalidRow {
                    row,
                    reason: format!("expected 5 fields, found {}", record.len()),
                });
            }
            let start_date = parse_date(&record[2]).ok_or_else(|| PortfolioError::InvalidRow {
                row,
                reason: format!("invalid start_date {:?}", &record[2]),
            })?;
            let end_date = if record[3].trim().is_empty() {
                None
            } else {
                Some(parse_date(&record[3]).ok_or_else(|| PortfolioError::InvalidRow {
                    row,
                    reason: format!("invalid end_date {:?}", &record[3]),
                })?)
            };
            sites.push(ProjectSite {
                project_id: record[0].trim().to_string(),
                root_domain: record[1].trim().to_lowercase(),
                start_date,
                end_date,
                title: record[4].to_string(),
            });
        }
        Self::new(sites)
    }

    pub fn get(&self, project_id: &str) -> Option<&ProjectSite> {
        self.by_id.get(project_id).map(|&i| &self.sites[i])
    }

    pub fn contains(&self, project_id: &str) -> bool {
        self.by_id.contains_key(project_id)
    }

    /// Sites in project-id order.
    pub fn sites(&self) -> &[ProjectSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Diagnostic pass used by configuration validation: reports every root
    /// domain that is not a well-formed registrable domain under `rules`, and
    /// every root domain shared by two projects.
    pub fn domain_problems(&self, rules: &SuffixRuleSet) -> Vec<String> {
        let mut problems = Vec::new();
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for site in &self.sites {
            match split_domain(&site.root_domain, rules) {
                Ok(parsed) if parsed.root_domain == site.root_domain => {}
                Ok(parsed) => problems.push(format!(
                    "project {:?}: {:?} is not a registrable domain (its root is {:?})",
                    site.project_id, site.root_domain, parsed.root_domain
                )),
                Err(e) => problems.push(format!(
                    "project {:?}: root_domain {:?} does not parse: {e}",
                    site.project_id, site.root_domain
                )),
            }
            if let Some(other) = seen.insert(&site.root_domain, &site.project_id) {
                problems.push(format!(
                    "projects {:?} and {:?} share root domain {:?}",
                    other, site.project_id, site.root_domain
                ));
            }
        }
        problems
    }
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn validate_site(site: &ProjectSite, row: usize) -> Result<(), PortfolioError> {
    let invalid = |reason: String| PortfolioError::InvalidRow { row, reason };
    if site.project_id.is_empty() {
        return Err(invalid("project_id is empty".into()));
    }
    if !site
        .project_id
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
    {
        return Err(invalid(format!(
            "project_id {:?} is not a slug (allowed: alphanumerics, '-', '_', '.')",
            site.project_id
        )));
    }
    if site.root_domain.is_empty() || !site.root_domain.contains('.') {
        return Err(invalid(format!(
            "root_domain {:?} is not a domain",
            site.root_domain
        )));
    }
    if let Some(end) = site.end_date {
        if end < site.start_date {
            return Err(invalid(format!(
                "end_date {} precedes start_date {}",
                end, site.start_date
            )));
        }
    }
    Ok(())
}
