//! Deterministic random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// Independent stream `task` of the generator seeded by `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Uniform point on the ℓ1 unit sphere of `ℝ^dim`: exponential magnitudes
/// normalized to sum 1, independent random signs.
pub fn l1_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
        if rng.random::<bool>() {
            *x = -*x;
        }
    }
    v
}
