//! Benchmarks for the hot paths: URL normalization and domain splitting,
//! both bipartite projections, modularity clustering, and the rank
//! correlation. Run with `cargo bench`.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use colink_bench::{synthetic_incidence, synthetic_urls, tie_bearing_values};
use colink_core::cluster::cluster_network;
use colink_core::domain::{normalize_host, split_domain, SuffixRuleSet};
use colink_core::metrics::spearman_rank_correlation;
use colink_core::network::{colinked_matrix, colinking_matrix};

fn bench_domain_parsing(c: &mut Criterion) {
    let urls = synthetic_urls(1000, 11);
    let rules = SuffixRuleSet::builtin();
    c.bench_function("normalize_and_split_1000_urls", |b| {
        b.iter(|| {
            for url in &urls {
                let host = normalize_host(black_box(url)).unwrap();
                black_box(split_domain(&host, rules).ok());
            }
        })
    });
}

fn bench_projections(c: &mut Criterion) {
    let inc = synthetic_incidence(2000, 120, 6, 3, 22);
    c.bench_function("colinked_matrix_2000x120", |b| {
        b.iter(|| black_box(colinked_matrix(black_box(&inc))))
    });
    c.bench_function("colinking_matrix_2000x120", |b| {
        b.iter(|| black_box(colinking_matrix(black_box(&inc))))
    });
}

fn bench_clustering(c: &mut Criterion) {
    let projects = colinked_matrix(&synthetic_incidence(2000, 120, 6, 3, 33));
    c.bench_function("cluster_colinked_120_nodes", |b| {
        b.iter(|| black_box(cluster_network(black_box(&projects), 1.0, 42, 10).unwrap()))
    });
    let referrers = colinking_matrix(&synthetic_incidence(800, 120, 6, 3, 44));
    c.bench_function("cluster_colinking_800_nodes", |b| {
        b.iter(|| black_box(cluster_network(black_box(&referrers), 1.0, 42, 10).unwrap()))
    });
}

fn bench_spearman(c: &mut Criterion) {
    let xs = tie_bearing_values(1000, 55);
    let ys = tie_bearing_values(1000, 66);
    c.bench_function("spearman_1000_values", |b| {
        b.iter(|| black_box(spearman_rank_correlation(black_box(&xs), black_box(&ys)).unwrap()))
    });
}

fn configured() -> Criterion {
    Criterion::default()
        .sample_size(20)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(2))
}

criterion_group! {
    name = benches;
    config = configured();
    targets = bench_domain_parsing, bench_projections, bench_clustering, bench_spearman
}
criterion_main!(benches);
