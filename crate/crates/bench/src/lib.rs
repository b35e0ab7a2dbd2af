//! Deterministic fixture builders shared by the benchmark suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use colink_core::network::BipartiteIncidence;

/// Bipartite incidence with planted communities: referrers link `fanout`
/// projects inside their home community. Sized for the projection and
/// clustering paths; fully deterministic per seed.
pub fn synthetic_incidence(
    referrers: usize,
    projects: usize,
    communities: usize,
    fanout: usize,
    seed: u64,
) -> BipartiteIncidence {
    assert!(communities >= 1 && projects >= communities * fanout);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let referrer_labels: Vec<String> = (0..referrers).map(|i| format!("src{i:05}")).collect();
    let project_labels: Vec<String> = (0..projects).map(|i| format!("proj{i:04}")).collect();
    let members: Vec<Vec<u32>> = (0..communities)
        .map(|c| {
            (0..projects as u32)
                .filter(|p| *p as usize % communities == c)
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for d in 0..referrers {
        let home = &members[d % communities];
        for &p in home.choose_multiple(&mut rng, fanout) {
            edges.push((d as u32, p));
        }
    }
    BipartiteIncidence::new(referrer_labels, project_labels, edges)
}

/// Messy but loosely realistic URLs for the normalization path.
pub fn synthetic_urls(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = ["news", "shop", "media", "lab", "co", "org", "uk", "eu", "de", "example"];
    (0..count)
        .map(|i| {
            let host = (0..rng.gen_range(1..=3))
                .map(|_| labels[rng.gen_range(0..labels.len())])
                .collect::<Vec<_>>()
                .join(".");
            let scheme = if rng.gen_bool(0.7) { "https" } else { "http" };
            format!("{scheme}://www.{host}/page/{i}?ref={i}")
        })
        .collect()
}

/// Tie-bearing value vector for the rank-correlation path.
pub fn tie_bearing_values(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..40) as f64).collect()
}
