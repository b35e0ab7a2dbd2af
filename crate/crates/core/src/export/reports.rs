//! CSV and JSON report files for project metrics and TLD frequencies.

use std::fmt::Write as _;
use std::path::Path;

use super::ExportError;
use crate::metrics::{summarize, ProjectMetrics, TldFrequency};

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TLD_FREQUENCY_FILE: &str = "tld_frequency.csv";

/// Writes `metrics.csv`, `summary.json` and `tld_frequency.csv` into `dir`.
///
/// Undefined shares serialize as an empty CSV field and a JSON null; they
/// are never coerced to zero.
pub fn write_reports(
    metrics: &[ProjectMetrics],
    tld_table: &TldFrequency,
    dir: &Path,
) -> Result<(), ExportError> {
    let mut metrics_csv = String::from("project_id,total_referrers,internal_referrers,internal_share,age_days\n");
    for row in metrics {
        let share = row.internal_share.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            metrics_csv,
            "{},{},{},{},{}",
            row.project_id, row.total_referrers, row.internal_referrers, share, row.age_days
        )
        .expect("writing to a String cannot fail");
    }
    std::fs::write(dir.join(METRICS_FILE), metrics_csv)?;

    let summary = summarize(metrics);
    let mut summary_json =
        serde_json::to_string_pretty(&summary).expect("summary serialization cannot fail");
    summary_json.push('\n');
    std::fs::write(dir.join(SUMMARY_FILE), summary_json)?;

    let mut tld_csv = String::from("tld,distinct_domains\n");
    for (tld, count) in &tld_table.rows {
        writeln!(tld_csv, "{tld},{count}").expect("writing to a String cannot fail");
    }
    std::fs::write(dir.join(TLD_FREQUENCY_FILE), tld_csv)?;
    Ok(())
}
