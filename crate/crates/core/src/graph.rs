//! Undirected graphs and the two seeded random generators used for
//! problem instances: Erdős–Rényi G(n, p) and Watts–Strogatz small-world.
//!
//! All randomness goes through [`rng_from_seed`], a portable counter-based
//! generator pinned project-wide so that frozen edge lists stay stable
//! across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Project-wide pinned RNG. ChaCha8 is seedable, portable, and identical
/// on every platform for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple undirected graph. Edges are stored as (u, v) with u < v,
/// sorted lexicographically and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Normalizes edge orientation/order and checks the invariants.
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "graph needs at least 2 vertices, got {n}"
            )));
        }
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let g = Graph { n, edges };
        g.validate()?;
        Ok(g)
    }

    /// Checks the stored-form invariants without modifying anything.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Schema(format!("vertex count {} < 2", self.n)));
        }
        for w in self.edges.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Schema(format!(
                    "edges not sorted/duplicate-free near {:?}",
                    w[1]
                )));
            }
        }
        for &(u, v) in &self.edges {
            if u >= v {
                return Err(Error::Schema(format!("edge ({u}, {v}) not oriented u < v")));
            }
            if v >= self.n {
                return Err(Error::Schema(format!(
                    "edge ({u}, {v}) endpoint out of range for n = {}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// G(n, p): each of the C(n, 2) vertex pairs is included independently
/// with probability `p_edge`. Pairs are visited in lexicographic order so
/// a fixed seed gives a fixed graph.
pub fn gen_erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p_edge} outside [0, 1]"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p_edge {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Watts–Strogatz: start from the regular ring lattice with even mean
/// degree k, then rewire each clockwise edge (i, i+r) independently with
/// probability `p_rewire` to a uniformly chosen non-neighbor of i. When a
/// vertex is already adjacent to everything else the edge is kept, which
/// preserves the nk/2 edge count.
pub fn gen_watts_strogatz(n: usize, k: usize, p_rewire: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} < 2")));
    }
    if k % 2 != 0 || k < 2 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "mean degree k = {k} must be even with 2 <= k < n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::InvalidParameter(format!(
            "rewiring probability {p_rewire} outside [0, 1]"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let ord = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    for r in 1..=(k / 2) {
        for i in 0..n {
            edge_set.insert(ord(i, (i + r) % n));
        }
    }
    // Rewiring pass visits the original lattice edges in the same order
    // they were created.
    for r in 1..=(k / 2) {
        for i in 0..n {
            let j = (i + r) % n;
            if rng.gen::<f64>() >= p_rewire {
                continue;
            }
            let neighbors: BTreeSet<usize> = edge_set
                .iter()
                .filter_map(|&(a, b)| {
                    if a == i {
                        Some(b)
                    } else if b == i {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            let candidates: Vec<usize> = (0..n)
                .filter(|&w| w != i && !neighbors.contains(&w))
                .collect();
            if candidates.is_empty() {
                continue; // complete neighborhood: keep the original edge
            }
            let w = candidates[rng.gen_range(0..candidates.len())];
            edge_set.remove(&ord(i, j));
            edge_set.insert(ord(i, w));
        }
    }
    Graph::new(n, edge_set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn er_probability_one_is_complete() {
        let g = gen_erdos_renyi(4, 1.0, 123).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn er_probability_zero_is_empty() {
        let g = gen_erdos_renyi(4, 0.0, 123).unwrap();
        assert!(g.edges.is_empty());
    }

    #[test]
    fn er_deterministic() {
        let a = gen_erdos_renyi(7, 0.8, 42).unwrap();
        let b = gen_erdos_renyi(7, 0.8, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn er_rejects_bad_params() {
        assert!(gen_erdos_renyi(1, 0.5, 0).is_err());
        assert!(gen_erdos_renyi(4, 1.5, 0).is_err());
        assert!(gen_erdos_renyi(4, -0.1, 0).is_err());
    }

    #[test]
    fn er_edge_count_statistics() {
        // Mean edge count over 2000 seeds at (n=7, p=0.8) should sit within
        // 3 standard errors of 21 * 0.8 = 16.8.
        let trials = 2000usize;
        let total: usize = (0..trials)
            .map(|s| gen_erdos_renyi(7, 0.8, s as u64).unwrap().edge_count())
            .sum();
        let mean = total as f64 / trials as f64;
        let var = 21.0 * 0.8 * 0.2;
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - 16.8).abs() <= 3.0 * se,
            "mean = {mean}, expected 16.8 +/- {}",
            3.0 * se
        );
    }

    #[test]
    fn ws_no_rewiring_is_ring_lattice() {
        let g = gen_watts_strogatz(9, 6, 0.0, 0).unwrap();
        assert_eq!(g.edge_count(), 27);
        for i in 0..9usize {
            for r in 1..=3usize {
                let j = (i + r) % 9;
                let e = if i < j { (i, j) } else { (j, i) };
                assert!(g.edges.contains(&e));
            }
        }
    }

    #[test]
    fn ws_full_rewiring_conserves_edges_and_degree() {
        let g = gen_watts_strogatz(9, 6, 1.0, 7).unwrap();
        assert_eq!(g.edge_count(), 27);
        for v in 0..9 {
            assert!(g.degree(v) >= 3, "vertex {v} degree {}", g.degree(v));
        }
    }

    #[test]
    fn ws_rejects_bad_params() {
        assert!(gen_watts_strogatz(9, 5, 0.5, 0).is_err()); // odd k
        assert!(gen_watts_strogatz(6, 6, 0.5, 0).is_err()); // k >= n
        assert!(gen_watts_strogatz(9, 6, 1.5, 0).is_err());
    }

    proptest! {
        #[test]
        fn ws_invariants_hold(n in 5usize..14, half_k in 1usize..4, p in 0.0f64..=1.0, seed in 0u64..10_000) {
            let k = 2 * half_k;
            prop_assume!(k < n);
            let g = gen_watts_strogatz(n, k, p, seed).unwrap();
            prop_assert_eq!(g.edge_count(), n * k / 2);
            g.validate().unwrap();
            for &(u, v) in &g.edges {
                prop_assert!(u < v);
            }
        }

        #[test]
        fn er_invariants_hold(n in 2usize..12, p in 0.0f64..=1.0, seed in 0u64..10_000) {
            let g = gen_erdos_renyi(n, p, seed).unwrap();
            g.validate().unwrap();
        }
    }
}
