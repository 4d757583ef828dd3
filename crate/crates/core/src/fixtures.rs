//! Seeded synthetic graphs and outcome vectors.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::Graph;
use crate::outcome::OutcomeVector;

/// Nodes in the seed clique of [`heavy_tailed_graph`].
pub const SEED_CLIQUE: usize = 10;

/// Undirected preferential-attachment graph with a heavy-tailed degree
/// distribution and many degree-one nodes.
///
/// Starts from a clique on [`SEED_CLIQUE`] nodes. Each new node attaches
/// to `m` distinct existing nodes chosen proportionally to degree, where
/// `m` is 1 with probability 0.35, 2 with probability 0.10 and otherwise
/// uniform on 5..=20. At n = 5000 the mean degree is close to 15.
pub fn heavy_tailed_graph(n: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m0 = SEED_CLIQUE.min(n);
    let mut edges = Vec::new();
    let mut ends: Vec<u32> = Vec::new();
    for i in 0..m0 {
        for j in 0..i {
            edges.push((j, i));
            ends.extend([i as u32, j as u32]);
        }
    }
    let mut chosen = Vec::new();
    for v in m0..n {
        let r: f64 = rng.random();
        let m = if r < 0.35 {
            1
        } else if r < 0.45 {
            2
        } else {
            rng.random_range(5..=20)
        };
        chosen.clear();
        while chosen.len() < m.min(v) {
            let u = *ends.choose(&mut rng).expect("seed clique has edges");
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            edges.push((u as usize, v));
            ends.extend([u, v as u32]);
        }
    }
    Graph::from_edges(n, false, edges)
}

/// Bernoulli random graph: each dyad (each ordered pair when directed)
/// present independently with probability `p`.
pub fn random_graph(n: usize, p: f64, directed: bool, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, directed, edges)
}

/// Sparse random graph with about `mean_degree` ties per node, drawn by
/// sampling endpoint pairs (linear in the number of ties).
pub fn sparse_random_graph(n: usize, mean_degree: f64, directed: bool, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ties = if directed {
        mean_degree * n as f64
    } else {
        mean_degree * n as f64 / 2.0
    } as usize;
    let edges: Vec<_> = (0..ties)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    Graph::from_edges(n, directed, edges)
}

/// Independent Bernoulli(`p`) outcomes.
pub fn bernoulli_outcome(n: usize, p: f64, seed: u64) -> OutcomeVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OutcomeVector::new((0..n).map(|_| rng.random_bool(p) as u8).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy_tailed_shape() {
        let g = heavy_tailed_graph(2000, 7).unwrap();
        assert_eq!(g.node_count(), 2000);
        let mean = 2.0 * g.edge_count() as f64 / 2000.0;
        assert!((10.0..20.0).contains(&mean), "mean degree {mean}");
        let ones = (0..2000).filter(|&i| g.degree(i) == 1).count();
        assert!(ones > 300, "{ones} degree-one nodes");
        assert!(g.max_degree() > 100);
    }

    #[test]
    fn seeded_generators_are_deterministic() {
        assert_eq!(
            heavy_tailed_graph(300, 3).unwrap().digest(),
            heavy_tailed_graph(300, 3).unwrap().digest()
        );
        assert_eq!(
            random_graph(20, 0.2, true, 1).unwrap().digest(),
            random_graph(20, 0.2, true, 1).unwrap().digest()
        );
    }
}
