#![allow(dead_code)]

use bnb_tsp::CostMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const C_STAR: &str = "4\n- 0 2 1\n2 - 0 2\n1 2 - 0\n0 1 2 -\n";

pub fn c_star() -> CostMatrix {
    CostMatrix::parse(C_STAR).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform entries in `0..=max`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, max: i64) -> CostMatrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=max)).collect())
        .collect();
    CostMatrix::from_rows(&rows).unwrap()
}

/// Like [`random_matrix`] but each off-diagonal cell is infinite with
/// probability `p_inf`.
pub fn random_sparse_matrix(rng: &mut ChaCha8Rng, n: usize, max: i64, p_inf: f64) -> CostMatrix {
    let rows: Vec<Vec<Option<i64>>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| (!rng.gen_bool(p_inf)).then(|| rng.gen_range(0..=max)))
                .collect()
        })
        .collect();
    CostMatrix::from_options(&rows).unwrap()
}
