use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{truncate, ShallowNet, TruncationLevel};
use crate::rng::task_rng;

use super::data::uniform_ball_point;
use super::train::FitResult;

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        McEstimate { mean, stderr: (var / n).sqrt(), samples: v.len() }
    }
}

/// `π_B(f_m(x))`.
pub fn predict_truncated(fit: &FitResult, x: &[f64], level: TruncationLevel) -> Result<f64> {
    Ok(truncate(level, fit.net.eval(x)?))
}

/// `‖π_B g - f‖²_{L²(μ)}` for the uniform measure on the ball, from `n_test`
/// fresh points.
pub fn generalization_error(
    net: &ShallowNet,
    target: impl Fn(&[f64]) -> f64,
    level: TruncationLevel,
    n_test: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_test < 100 {
        return Err(Error::InvalidParameter(format!("n_test must be >= 100, got {n_test}")));
    }
    let mut rng = task_rng(seed, 0);
    let mut sq = Vec::with_capacity(n_test);
    for _ in 0..n_test {
        let x = uniform_ball_point(&mut rng, net.dim());
        sq.push((truncate(level, net.eval(&x)?) - target(&x)).powi(2));
    }
    Ok(McEstimate::from_samples(&sq))
}
