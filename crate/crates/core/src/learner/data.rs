use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::task_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `N(0, σ²)`.
    Gaussian,
    /// `U[-σ, σ]`.
    UniformBounded,
    /// `±σ` with equal probability.
    RademacherScaled,
}

/// Zero-mean noise with sub-Gaussian parameter `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub sigma: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")));
        }
        Ok(NoiseModel { kind, sigma })
    }

    pub fn none() -> Self {
        NoiseModel { kind: NoiseKind::Gaussian, sigma: 0.0 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.sigma * z
            }
            NoiseKind::UniformBounded => self.sigma * rng.random_range(-1.0..=1.0),
            NoiseKind::RademacherScaled => {
                if rng.random::<bool>() {
                    self.sigma
                } else {
                    -self.sigma
                }
            }
        }
    }

    /// `E η²`.
    pub fn variance(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        match self.kind {
            NoiseKind::Gaussian | NoiseKind::RademacherScaled => s2,
            NoiseKind::UniformBounded => s2 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub d: usize,
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<f64>,
    pub target_id: String,
    /// Absent for imported data.
    pub noise: Option<NoiseModel>,
    pub seed: Option<u64>,
}

/// Uniform point in the unit ball of `ℝ^d`: Gaussian direction, radius `U^{1/d}`.
pub fn uniform_ball_point<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let r = rng.random::<f64>().powf(1.0 / d as f64);
        return g.into_iter().map(|v| r * v / norm).collect();
    }
}

pub fn sample_uniform_ball(d: usize, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need d >= 1 and n >= 1, got d={d}, n={n}")));
    }
    let mut rng = task_rng(seed, 0);
    Ok((0..n).map(|_| uniform_ball_point(&mut rng, d)).collect())
}

/// `y_i = f(x_i) + η_i` at `n` uniform ball points. Points and noise use
/// separate streams so the design does not depend on the noise model.
pub fn sample_dataset(
    target: impl Fn(&[f64]) -> f64,
    target_id: &str,
    d: usize,
    n: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<Dataset> {
    let xs = sample_uniform_ball(d, n, seed)?;
    let mut rng = task_rng(seed, 1);
    let mut ys = Vec::with_capacity(n);
    for x in &xs {
        let f = target(x);
        if !f.is_finite() {
            return Err(Error::Domain(format!("target is not finite at {x:?}")));
        }
        ys.push(f + noise.sample(&mut rng));
    }
    Ok(Dataset { d, xs, ys, target_id: target_id.to_string(), noise: Some(noise), seed: Some(seed) })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Header `x_1,…,x_d,y`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out: Vec<String> = (1..=self.d).map(|k| format!("x_{k}")).collect();
        out.push("y".into());
        let mut text = out.join(",") + "\n";
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let row: Vec<String> = x.iter().chain(std::iter::once(y)).map(|v| format!("{v:e}")).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        text
    }

    pub fn from_csv(text: &str, target_id: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty dataset CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let d = cols.len().saturating_sub(1);
        let expected: Vec<String> =
            (1..=d).map(|k| format!("x_{k}")).chain(std::iter::once("y".to_string())).collect();
        if d == 0 || cols != expected {
            return Err(Error::Format(format!("dataset header must be x_1..x_d,y, got {header:?}")));
        }
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (row, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))?;
            if vals.len() != d + 1 {
                return Err(Error::Format(format!("row {} has {} fields, expected {}", row + 1, vals.len(), d + 1)));
            }
            let x = vals[..d].to_vec();
            if x.iter().map(|v| v * v).sum::<f64>() > 1.0 + 1e-12 {
                return Err(Error::Domain(format!("row {} lies outside the unit ball", row + 1)));
            }
            xs.push(x);
            ys.push(vals[d]);
        }
        if ys.is_empty() {
            return Err(Error::Format("dataset has no rows".into()));
        }
        Ok(Dataset { d, xs, ys, target_id: target_id.to_string(), noise: None, seed: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_samples() {
        let xs = sample_uniform_ball(2, 100_000, 3).unwrap();
        assert!(xs.iter().all(|x| x.iter().map(|v| v * v).sum::<f64>() <= 1.0));
        let m2 = xs.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / xs.len() as f64;
        assert!((m2 - 0.5).abs() < 0.01, "{m2}");
        assert_eq!(xs, sample_uniform_ball(2, 100_000, 3).unwrap());
        for d in [1, 3, 5] {
            let xs = sample_uniform_ball(d, 20_000, 1).unwrap();
            let m2 = xs.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / 20_000.0;
            assert!((m2 - d as f64 / (d as f64 + 2.0)).abs() < 0.02);
        }
    }

    #[test]
    fn noise_moments() {
        let f = |x: &[f64]| x[0] - x[1];
        let clean = sample_dataset(f, "lin", 2, 50, NoiseModel::none(), 4).unwrap();
        assert!(clean.xs.iter().zip(&clean.ys).all(|(x, y)| *y == f(x)));
        let n = 100_000;
        for kind in [NoiseKind::Gaussian, NoiseKind::UniformBounded, NoiseKind::RademacherScaled] {
            let noise = NoiseModel::new(kind, 0.5).unwrap();
            let data = sample_dataset(|_| 0.0, "zero", 2, n, noise, 9).unwrap();
            let mean = data.ys.iter().sum::<f64>() / n as f64;
            assert!(mean.abs() < 4.0 * 0.5 / (n as f64).sqrt(), "{kind:?}: {mean}");
            let var = data.ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((var / noise.variance() - 1.0).abs() < 0.05, "{kind:?}: {var}");
        }
        assert!(NoiseModel::new(NoiseKind::Gaussian, -1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = sample_dataset(|x| x[0].sin(), "sin", 3, 20, NoiseModel::none(), 2).unwrap();
        let back = Dataset::from_csv(&data.to_csv(), "sin").unwrap();
        assert_eq!(back.xs, data.xs);
        assert_eq!(back.ys, data.ys);
        assert!(Dataset::from_csv("a,b\n1,2\n", "x").is_err());
        assert!(Dataset::from_csv("x_1,y\n2.0,1\n", "x").is_err());
        assert!(Dataset::from_csv("x_1,y\n0.5\n", "x").is_err());
    }
}
