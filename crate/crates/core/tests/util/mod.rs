//! Shared fixtures for integration tests.

// each test target uses its own subset
#![allow(dead_code)]

use hypermetric_core::space::{graph_metric, FiniteMetricSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random tree on `n` vertices with integer weights in 1..=4; vertex `k`
/// attaches to a uniformly random earlier vertex. Distances are exact in
/// f64, so tree identities hold with equality.
pub fn random_tree(n: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let w = rng.gen_range(1..=4) as f64;
        edges.push((parent, v, w));
    }
    graph_metric(n, &edges).unwrap()
}

/// Uniformly random distinct triple `i < j < k` from `0..n`.
pub fn random_triple(rng: &mut ChaCha8Rng, n: usize) -> [usize; 3] {
    loop {
        let mut t = [
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
        ];
        t.sort_unstable();
        if t[0] < t[1] && t[1] < t[2] {
            return t;
        }
    }
}
