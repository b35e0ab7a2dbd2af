//! Pipeline configuration: one TOML file plus flag overrides, flags win.
//!
//! Relative paths in the file resolve against the file's own directory, so
//! a workspace stays self-contained wherever it is invoked from. Date
//! fields are quoted strings in `YYYY-MM-DD` form.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use colink_core::domain::{CountryTldMap, SuffixRuleSet};
use colink_core::filter::CountryAllowlist;
use colink_core::ingest::ProviderConfig;

use crate::CliError;

/// Flag-level overrides; `None` keeps the file (or default) value.
#[derive(Debug, Default)]
pub struct Overrides {
    pub snapshot_date: Option<NaiveDate>,
    pub output_dir: Option<PathBuf>,
    pub cluster_resolution: Option<f64>,
    pub cluster_seed: Option<u64>,
    pub cluster_restarts: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    portfolio: String,
    snapshot_date: Option<String>,
    suffix_rules: Option<String>,
    allowlist: Option<String>,
    tld_country_map: Option<String>,
    banned_tlds: Option<Vec<String>>,
    cluster_resolution: Option<f64>,
    cluster_seed: Option<u64>,
    cluster_restarts: Option<u32>,
    output_dir: Option<String>,
    provider: Option<ProviderConfig>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub portfolio: PathBuf,
    pub snapshot_date: NaiveDate,
    /// None means the bundled rule set.
    pub suffix_rules: Option<PathBuf>,
    /// None means the bundled allowlist.
    pub allowlist: Option<PathBuf>,
    /// None means the bundled TLD-country table.
    pub tld_country_map: Option<PathBuf>,
    pub banned_tlds: Vec<String>,
    pub cluster_resolution: f64,
    pub cluster_seed: u64,
    pub cluster_restarts: u32,
    pub output_dir: PathBuf,
    pub provider: Option<ProviderConfig>,
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let file: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &str| base.join(p);

        let snapshot_date = match (&overrides.snapshot_date, &file.snapshot_date) {
            (Some(date), _) => *date,
            (None, Some(text)) => NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| {
                CliError::Config(format!(
                    "snapshot_date {text:?} is not a YYYY-MM-DD date"
                ))
            })?,
            (None, None) => chrono::Local::now().date_naive(),
        };

        let cluster_resolution = overrides
            .cluster_resolution
            .or(file.cluster_resolution)
            .unwrap_or(1.0);
        if !(cluster_resolution.is_finite() && cluster_resolution > 0.0) {
            return Err(CliError::Config(format!(
                "cluster_resolution must be a positive number, got {cluster_resolution}"
            )));
        }
        let cluster_restarts = overrides
            .cluster_restarts
            .or(file.cluster_restarts)
            .unwrap_or(10);
        if cluster_restarts == 0 {
            return Err(CliError::Config("cluster_restarts must be at least 1".into()));
        }

        let banned_tlds = file
            .banned_tlds
            .unwrap_or_else(|| vec!["com".to_string()])
            .into_iter()
            .map(|t| t.to_lowercase())
            .collect();

        Ok(Self {
            portfolio: resolve(&file.portfolio),
            snapshot_date,
            suffix_rules: file.suffix_rules.as_deref().map(resolve),
            allowlist: file.allowlist.as_deref().map(resolve),
            tld_country_map: file.tld_country_map.as_deref().map(resolve),
            banned_tlds,
            cluster_resolution,
            cluster_seed: overrides.cluster_seed.or(file.cluster_seed).unwrap_or(42),
            cluster_restarts,
            output_dir: overrides
                .output_dir
                .clone()
                .unwrap_or_else(|| resolve(file.output_dir.as_deref().unwrap_or("out"))),
            provider: file.provider,
        })
    }

    /// Missing referenced files, one message per problem.
    pub fn reference_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut check = |label: &str, path: &Path| {
            if !path.is_file() {
                problems.push(format!("{label} file not found: {}", path.display()));
            }
        };
        check("portfolio", &self.portfolio);
        if let Some(p) = &self.suffix_rules {
            check("suffix_rules", p);
        }
        if let Some(p) = &self.allowlist {
            check("allowlist", p);
        }
        if let Some(p) = &self.tld_country_map {
            check("tld_country_map", p);
        }
        problems
    }

    pub fn ensure_references(&self) -> Result<(), CliError> {
        match self.reference_problems().first() {
            Some(problem) => Err(CliError::Config(problem.clone())),
            None => Ok(()),
        }
    }

    pub fn snapshot_dir(&self) -> PathBuf {
        self.output_dir.join("snapshot")
    }

    pub fn load_suffix_rules(&self) -> Result<SuffixRuleSet, CliError> {
        match &self.suffix_rules {
            Some(path) => SuffixRuleSet::from_path(path)
                .map_err(|e| CliError::Config(format!("suffix_rules: {e}"))),
            None => Ok(SuffixRuleSet::builtin().clone()),
        }
    }

    pub fn load_allowlist(&self) -> Result<CountryAllowlist, CliError> {
        match &self.allowlist {
            Some(path) => CountryAllowlist::from_path(path)
                .map_err(|e| CliError::Config(format!("allowlist: {e}"))),
            None => Ok(CountryAllowlist::builtin().clone()),
        }
    }

    pub fn load_tld_map(&self) -> Result<CountryTldMap, CliError> {
        match &self.tld_country_map {
            Some(path) => CountryTldMap::from_path(path)
                .map_err(|e| CliError::Config(format!("tld_country_map: {e}"))),
            None => Ok(CountryTldMap::builtin().clone()),
        }
    }

    /// Label for the run manifest: the explicit path, or "builtin".
    pub fn source_label(path: &Option<PathBuf>) -> String {
        path.as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "builtin".to_string())
    }
}
