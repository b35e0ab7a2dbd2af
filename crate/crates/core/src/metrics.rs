//! Descriptive statistics over classified relations: per-project referrer
//! counts and internal shares, TLD frequency, project age, and the Spearman
//! rank correlation between age and attention.

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::filter::{ClassifiedRelation, Origin};
use crate::ingest::{Portfolio, RelationSet};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("input contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectMetrics {
    pub project_id: String,
    /// Distinct referring domains linking this project.
    pub total_referrers: usize,
    pub internal_referrers: usize,
    /// None when the project has no referrers at all: an empty denominator
    /// is reported as undefined, never as a zero share.
    pub internal_share: Option<f64>,
    /// Days from the project's start date to the snapshot date.
    pub age_days: i64,
    /// True when the start date lay after the snapshot and age was clamped.
    pub age_clamped: bool,
}

/// Distinct referring-domain counts per public suffix, sorted by descending
/// count, then suffix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TldFrequency {
    pub rows: Vec<(String, usize)>,
}

/// Portfolio-level roll-up of [`ProjectMetrics`].
///
/// Share statistics run over projects with a defined share; projects without
/// referrers are tallied in `undefined_share_count` instead. The zero-internal
/// count covers projects that have referrers but none internal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioSummary {
    pub project_count: usize,
    pub mean_internal_share: Option<f64>,
    pub max_internal_share: Option<f64>,
    pub zero_internal_count: usize,
    pub undefined_share_count: usize,
    /// Spearman r_s of age in days vs. total referrers, over all projects.
    /// None when the correlation is undefined (fewer than two projects or a
    /// constant vector).
    pub spearman_age_vs_referrers: Option<f64>,
}

/// Days from `start` to `snapshot`, clamped to zero when the project starts
/// after the snapshot. The flag reports whether clamping happened.
pub fn project_age_days(start: NaiveDate, snapshot: NaiveDate) -> (i64, bool) {
    let days = (snapshot - start).num_days();
    if days < 0 {
        (0, true)
    } else {
        (days, false)
    }
}

/// One metrics row per portfolio project, including projects that no
/// relation mentions.
pub fn compute_project_metrics(
    classified: &[ClassifiedRelation],
    portfolio: &Portfolio,
    snapshot: NaiveDate,
) -> Vec<ProjectMetrics> {
    let mut totals = std::collections::BTreeMap::new();
    for c in classified {
        let entry = totals.entry(c.relation.project_id.as_str()).or_insert((0usize, 0usize));
        entry.0 += 1;
        if c.origin == Origin::Internal {
            entry.1 += 1;
        }
    }
    portfolio
        .sites()
        .iter()
        .map(|site| {
            let (total, internal) = totals
                .get(site.project_id.as_str())
                .copied()
                .unwrap_or((0, 0));
            let (age_days, age_clamped) = project_age_days(site.start_date, snapshot);
            ProjectMetrics {
                project_id: site.project_id.clone(),
                total_referrers: total,
                internal_referrers: internal,
                internal_share: (total > 0).then(|| internal as f64 / total as f64),
                age_days,
                age_clamped,
            }
        })
        .collect()
}

/// Counts distinct referring domains per suffix. A domain linking several
/// projects contributes once to its suffix, not once per relation.
pub fn tld_frequency(relations: &RelationSet) -> TldFrequency {
    let distinct: std::collections::BTreeSet<(String, String)> = relations
        .iter()
        .map(|r| (r.referring_tld, r.referring_domain))
        .collect();
    let mut counts = std::collections::BTreeMap::new();
    for (tld, _) in distinct {
        *counts.entry(tld).or_insert(0usize) += 1;
    }
    let mut rows: Vec<(String, usize)> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    TldFrequency { rows }
}

/// Spearman rank correlation with average-rank tie handling, computed as the
/// Pearson correlation of the two rank vectors.
///
/// The popular closed form 1 - 6*Σd²/(n(n²-1)) is only equivalent on
/// tie-free data, so it is not used here.
pub fn spearman_rank_correlation(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(MetricsError::DegenerateInput("fewer than two observations"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    if xs.iter().all(|v| *v == xs[0]) || ys.iter().all(|v| *v == ys[0]) {
        return Err(MetricsError::DegenerateInput("constant vector"));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    Ok(pearson(&rx, &ry))
}

/// 1-based ranks; tied values share the average of the ranks they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) hold one tie group; average their
        // 1-based ranks.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &index in &order[i..=j] {
            ranks[index] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    cov / (var_x * var_y).sqrt()
}

/// Rolls project metrics up into the portfolio summary block.
pub fn summarize(metrics: &[ProjectMetrics]) -> PortfolioSummary {
    let defined: Vec<f64> = metrics.iter().filter_map(|m| m.internal_share).collect();
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    let max = defined.iter().copied().reduce(f64::max);
    let ages: Vec<f64> = metrics.iter().map(|m| m.age_days as f64).collect();
    let totals: Vec<f64> = metrics.iter().map(|m| m.total_referrers as f64).collect();
    PortfolioSummary {
        project_count: metrics.len(),
        mean_internal_share: mean,
        max_internal_share: max,
        zero_internal_count: metrics
            .iter()
            .filter(|m| m.total_referrers > 0 && m.internal_referrers == 0)
            .count(),
        undefined_share_count: metrics.iter().filter(|m| m.total_referrers == 0).count(),
        spearman_age_vs_referrers: spearman_rank_correlation(&ages, &totals).ok(),
    }
}
