//! `colink analyze`: snapshot to reports and clustered network exports.
//!
//! The country filter and classification run once on the full snapshot.
//! Metrics, the internal co-linked network and the TLD table use that
//! unbanned set; the external networks additionally drop banned TLDs. Two
//! runs over the same snapshot and config produce byte-identical files;
//! wall-clock timings go to a separate volatile file so the manifest stays
//! deterministic.

use std::collections::BTreeSet;
use std::time::Instant;

use sha2::{Digest, Sha256};

use colink_core::cluster::cluster_network;
use colink_core::export::{to_network_document, write_pajek, write_reports, write_vosviewer};
use colink_core::filter::{classify_relations, exclude_tlds, filter_by_country};
use colink_core::ingest::{snapshot_read, Portfolio, RELATIONS_FILE};
use colink_core::metrics::{compute_project_metrics, summarize, tld_frequency};
use colink_core::network::{colinked_matrix, colinking_matrix, BipartiteIncidence, OriginFilter};
use colink_core::CoOccurrenceMatrix;

use crate::config::PipelineConfig;
use crate::CliError;

pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
pub const RUN_TIMINGS_FILE: &str = "run_timings.json";

pub fn run(config: &PipelineConfig) -> Result<(), CliError> {
    let started = Instant::now();
    config.ensure_references()?;

    let snapshot_dir = config.snapshot_dir();
    if !snapshot_dir.join(RELATIONS_FILE).exists() {
        return Err(CliError::Io(format!(
            "snapshot not found: expected {}; run `colink ingest` first",
            snapshot_dir.join(RELATIONS_FILE).display()
        )));
    }
    let (relations, snapshot_manifest) =
        snapshot_read(&snapshot_dir).map_err(|e| CliError::Io(e.to_string()))?;
    let portfolio = Portfolio::from_csv_path(&config.portfolio)
        .map_err(|e| CliError::Config(format!("portfolio {}: {e}", config.portfolio.display())))?;
    let allowlist = config.load_allowlist()?;
    let tld_map = config.load_tld_map()?;

    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        CliError::Io(format!("cannot create {}: {e}", config.output_dir.display()))
    })?;

    // Country filter, then internal/external classification. A duplicate
    // portfolio domain is a configuration defect, not an io failure.
    let kept = filter_by_country(&relations, &allowlist, &tld_map);
    let classified =
        classify_relations(&kept, &portfolio).map_err(|e| CliError::Config(e.to_string()))?;

    let metrics = compute_project_metrics(&classified, &portfolio, config.snapshot_date);
    for row in metrics.iter().filter(|m| m.age_clamped) {
        eprintln!(
            "warning: project {} starts after the snapshot date; age clamped to 0",
            row.project_id
        );
    }
    // The TLD table describes the country-filtered set before any ban, the
    // same population the metrics run on.
    let tld_table = tld_frequency(&kept);
    write_reports(&metrics, &tld_table, &config.output_dir)
        .map_err(|e| CliError::Io(e.to_string()))?;

    // Internal network: no TLD ban, project sites link each other mostly
    // under portfolio TLDs and the ban targets external noise only.
    let internal_inc =
        BipartiteIncidence::from_classified(&classified, &portfolio, OriginFilter::Internal);
    let mut networks = Vec::new();
    networks.push(export_network(
        "internal_colinked",
        colinked_matrix(&internal_inc),
        config,
    )?);

    // External networks: banned TLDs removed before building the incidence.
    let banned: BTreeSet<String> = config.banned_tlds.iter().cloned().collect();
    let external_kept = exclude_tlds(&kept, &banned);
    let external_classified = classify_relations(&external_kept, &portfolio)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let external_inc = BipartiteIncidence::from_classified(
        &external_classified,
        &portfolio,
        OriginFilter::External,
    );
    networks.push(export_network(
        "external_colinked",
        colinked_matrix(&external_inc),
        config,
    )?);
    networks.push(export_network(
        "external_colinking",
        colinking_matrix(&external_inc),
        config,
    )?);

    let summary = summarize(&metrics);
    let manifest = serde_json::json!({
        "snapshot_date": config.snapshot_date,
        "snapshot": snapshot_manifest,
        "portfolio_file": config.portfolio.display().to_string(),
        "portfolio_sha256": file_digest(&config.portfolio)?,
        "parameters": {
            "allowlist": PipelineConfig::source_label(&config.allowlist),
            "suffix_rules": PipelineConfig::source_label(&config.suffix_rules),
            "tld_country_map": PipelineConfig::source_label(&config.tld_country_map),
            "banned_tlds": config.banned_tlds,
            "cluster_resolution": config.cluster_resolution,
            "cluster_seed": config.cluster_seed,
            "cluster_restarts": config.cluster_restarts,
        },
        "relations_after_country_filter": kept.len(),
        "distinct_referring_domains_after_country_filter": kept.distinct_referring_domains(),
        "summary": summary,
        "networks": networks,
    });
    let mut manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail");
    manifest_text.push('\n');
    std::fs::write(config.output_dir.join(RUN_MANIFEST_FILE), manifest_text)
        .map_err(|e| CliError::Io(e.to_string()))?;

    // Timing is the one legitimately non-reproducible output; it lives in
    // its own file so everything else stays byte-comparable.
    let timings = serde_json::json!({ "analyze_ms": started.elapsed().as_millis() as u64 });
    std::fs::write(
        config.output_dir.join(RUN_TIMINGS_FILE),
        format!("{timings}\n"),
    )
    .map_err(|e| CliError::Io(e.to_string()))?;

    println!(
        "analyzed {} relations over {} projects into {}",
        kept.len(),
        portfolio.len(),
        config.output_dir.display()
    );
    Ok(())
}

/// Clusters and writes one network, or skips it with a warning when it has
/// no edges. Returns the manifest entry either way.
fn export_network(
    name: &str,
    matrix: CoOccurrenceMatrix,
    config: &PipelineConfig,
) -> Result<serde_json::Value, CliError> {
    if matrix.weights.is_empty() {
        eprintln!("warning: network {name} has no edges; skipping export");
        return Ok(serde_json::json!({
            "name": name,
            "nodes": matrix.node_count(),
            "edges": 0,
            "skipped": true,
        }));
    }
    let clustered = cluster_network(
        &matrix,
        config.cluster_resolution,
        config.cluster_seed,
        config.cluster_restarts,
    )
    .map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    let doc = to_network_document(&clustered);
    let map_path = config.output_dir.join(format!("{name}_map.txt"));
    let net_path = config.output_dir.join(format!("{name}_network.txt"));
    let pajek_path = config.output_dir.join(format!("{name}.paj"));
    write_vosviewer(&doc, &map_path, &net_path).map_err(|e| CliError::Io(e.to_string()))?;
    write_pajek(&doc, &pajek_path).map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "network {name}: {} nodes, {} edges, {} clusters",
        doc.nodes.len(),
        doc.edges.len(),
        clustered.cluster_count()
    );
    Ok(serde_json::json!({
        "name": name,
        "nodes": doc.nodes.len(),
        "edges": doc.edges.len(),
        "clusters": clustered.cluster_count(),
        "modularity": clustered.modularity,
        "skipped": false,
    }))
}

fn file_digest(path: &std::path::Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}
