//! Shared helpers for the fuzzyqa benchmarks.

use fuzzyqa_core::cocluster::TermDocMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random nonnegative matrix for clustering benchmarks.
pub fn random_matrix(seed: u64, docs: usize, words: usize) -> TermDocMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..docs)
        .map(|_| (0..words).map(|_| rng.random::<f64>() + 0.01).collect())
        .collect();
    TermDocMatrix::from_rows(
        (0..docs as u32).collect(),
        (0..words).map(|j| format!("w{j}")).collect(),
        rows,
    )
    .expect("generated matrix is valid")
}
