//! Chance level of a uniformly random pointer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::HarnessError;

/// Probability n^(-m) that a uniform pointer over `n` positions emits one
/// fixed sequence of `m` indices.
pub fn random_pointing_baseline(n: usize, m: usize) -> Result<f64, HarnessError> {
    if n == 0 || m == 0 {
        return Err(HarnessError::Invalid("baseline needs n >= 1 and m >= 1".into()));
    }
    Ok((-(m as f64) * (n as f64).ln()).exp())
}

/// Fraction of `trials` uniform draws of `target.len()` indices below `n`
/// that reproduce `target`.
pub fn simulate_random_pointing(n: usize, target: &[usize], trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..trials)
        .filter(|_| target.iter().all(|&t| rng.gen_range(0..n) == t))
        .count();
    hits as f64 / trials as f64
}
