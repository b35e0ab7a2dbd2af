//! `colink ingest`: reduce backlink sources to a relation snapshot.

use std::path::PathBuf;

use colink_core::ingest::{
    fetch_referring_domains, import_backlinks_csv, snapshot_write, HttpProvider, Portfolio,
    RelationSet, RetryPolicy,
};

use crate::config::PipelineConfig;
use crate::CliError;

pub fn run(config: &PipelineConfig, from_csv: &[PathBuf], fetch: bool) -> Result<(), CliError> {
    config.ensure_references()?;
    let rules = config.load_suffix_rules()?;
    let portfolio = Portfolio::from_csv_path(&config.portfolio)
        .map_err(|e| CliError::Config(format!("portfolio {}: {e}", config.portfolio.display())))?;

    let mut relations = RelationSet::new();
    for path in from_csv {
        let (batch, stats) = import_backlinks_csv(path, &portfolio, &rules)
            .map_err(|e| CliError::Io(e.to_string()))?;
        println!("{}: {stats}", path.display());
        relations.merge(batch);
    }

    if fetch {
        let provider_config = config.provider.as_ref().ok_or_else(|| {
            CliError::Config("--fetch requires a [provider] section in the config".into())
        })?;
        let provider =
            HttpProvider::new(provider_config).map_err(|e| CliError::Provider(e.to_string()))?;
        let policy = RetryPolicy {
            max_attempts: provider_config.retry_max_attempts,
            ..RetryPolicy::default()
        };
        for site in portfolio.sites() {
            let (batch, stats) = fetch_referring_domains(site, &provider, &rules, &policy)
                .map_err(|e| CliError::Provider(format!("{}: {e}", site.project_id)))?;
            println!(
                "{}: {} pages, {} domains seen, {} rejected, {} self-links dropped, {} retries",
                site.project_id,
                stats.pages_fetched,
                stats.domains_seen,
                stats.domains_rejected,
                stats.self_links_dropped,
                stats.retries
            );
            relations.merge(batch);
        }
    }

    let snapshot_dir = config.snapshot_dir();
    let manifest = snapshot_write(&relations, config.snapshot_date, &snapshot_dir)
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "snapshot {}: {} relations, {} referring domains, {} projects",
        snapshot_dir.display(),
        manifest.relation_count,
        manifest.distinct_referring_domains,
        manifest.project_count
    );
    Ok(())
}
