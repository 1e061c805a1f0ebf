//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use hyperthresh::{Hypergraph, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random hypergraph on `n` points with `1..=max_edges` nonempty edges of size at most `max_size`.
pub fn random_hypergraph(r: &mut ChaCha8Rng, n: usize, max_edges: usize, max_size: usize) -> Hypergraph {
    let count = r.random_range(1..=max_edges);
    let edges = (0..count).map(|_| {
        let size = r.random_range(1..=max_size.min(n));
        let mut e = Subset::EMPTY;
        while e.len() < size {
            e = e.with(r.random_range(0..n));
        }
        e
    });
    Hypergraph::new(n, edges).unwrap()
}

pub fn random_subset(r: &mut ChaCha8Rng, n: usize, density: f64) -> Subset {
    (0..n).filter(|_| r.random_bool(density)).collect()
}

/// `μ_p` by summing over all `2^n` subsets.
pub fn mu_by_enumeration(h: &Hypergraph, p: f64) -> f64 {
    let n = h.n();
    (0u64..1 << n)
        .map(Subset::from_bits)
        .filter(|a| h.edges().iter().any(|e| e.is_subset_of(*a)))
        .map(|a| p.powi(a.len() as i32) * (1.0 - p).powi((n - a.len()) as i32))
        .sum()
}

/// Minimum cover cost by dynamic programming over sets of covered edges.
///
/// Candidates are all subsets of all edges; a candidate `U` covers every edge
/// containing it. Exact for up to ~20 edges.
pub fn min_cover_by_dp(h: &Hypergraph, p: f64) -> f64 {
    let edges = h.edges();
    let m = edges.len();
    let mut cands: Vec<Subset> = edges.iter().flat_map(|e| e.subsets()).collect();
    cands.sort_unstable();
    cands.dedup();
    let covers: Vec<(usize, f64)> = cands
        .iter()
        .map(|u| {
            let mask = edges
                .iter()
                .enumerate()
                .filter(|(_, e)| u.is_subset_of(**e))
                .fold(0usize, |acc, (j, _)| acc | 1 << j);
            (mask, p.powi(u.len() as i32))
        })
        .collect();
    let full = (1usize << m) - 1;
    let mut best = vec![f64::INFINITY; 1 << m];
    best[0] = 0.0;
    for mask in 0..=full {
        let here = best[mask];
        if here.is_infinite() {
            continue;
        }
        for &(c, cost) in &covers {
            let next = mask | c;
            if next != mask && here + cost < best[next] {
                best[next] = here + cost;
            }
        }
    }
    best[full]
}

/// `p_c` by bisecting the enumerated measure.
pub fn p_c_by_enumeration(h: &Hypergraph) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mu_by_enumeration(h, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
