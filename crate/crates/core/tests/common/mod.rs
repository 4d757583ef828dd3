#![allow(dead_code)]

use alaam::effects::DEFAULT_ALPHA;
use alaam::{CovariateTable, EffectSpec, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every effect kind applicable to a graph of the given direction, with
/// covariate effects reading columns `x` (continuous) and `c` (categorical).
pub fn all_effects(directed: bool) -> Vec<EffectSpec> {
    use EffectSpec::*;
    let mut v = vec![Density, Contagion, Covariate("x".into())];
    if directed {
        v.extend([
            Sender,
            Receiver,
            GwSender(DEFAULT_ALPHA),
            GwReceiver(0.3),
            Reciprocity,
            ContagionReciprocity,
            EgoInTwoStar,
            EgoOutTwoStar,
            EgoInThreeStar,
            EgoOutThreeStar,
            MixedTwoStar,
            MixedTwoStarSource,
            MixedTwoStarSink,
            TransitiveTriangleT1,
            TransitiveTriangleT3,
            TransitiveTriangleD1,
            TransitiveTriangleU1,
            CyclicTriangleC1,
            CyclicTriangleC3,
            AlterInTwoStar2,
            AlterOutTwoStar2,
            SenderMatch("c".into()),
            ReceiverMatch("c".into()),
            ReciprocityMatch("c".into()),
        ]);
    } else {
        v.extend([Activity, GwActivity(DEFAULT_ALPHA), GwActivity(1.7)]);
    }
    v
}

/// Graph with arbitrary dyads, from a per-dyad presence list.
pub fn graph_from_bits(n: usize, directed: bool, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if bits[k % bits.len()] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, directed, edges).unwrap()
}

pub fn covariates(n: usize, seed: u64) -> CovariateTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let c = (0..n).map(|_| rng.random_range(0..3u32)).collect();
    CovariateTable::empty(n)
        .with_continuous("x", x)
        .unwrap()
        .with_categorical("c", c)
        .unwrap()
}

pub fn random_outcome(n: usize, p: f64, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_bool(p) as u8).collect()
}
