//! Average-linkage agglomerative clustering over a precomputed distance matrix.

/// Merge the two closest clusters (mean pairwise distance) until no pair is
/// closer than `cut`. Clusters are returned as sorted member index lists,
/// ordered by their smallest member. Ties merge the pair with the smallest
/// indices first, so the result is deterministic.
pub fn average_linkage(dist: &[Vec<f64>], cut: f64) -> Vec<Vec<usize>> {
    let n = dist.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let d = linkage(dist, &clusters[a], &clusters[b]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        match best {
            Some((d, a, b)) if d <= cut => {
                let merged = clusters.remove(b);
                clusters[a].extend(merged);
                clusters[a].sort_unstable();
            }
            _ => break,
        }
    }
    clusters.sort_by_key(|c| c[0]);
    clusters
}

fn linkage(dist: &[Vec<f64>], a: &[usize], b: &[usize]) -> f64 {
    let total: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| dist[i][j])).sum();
    total / (a.len() * b.len()) as f64
}
