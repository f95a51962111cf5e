//! Mollified approximants `f_ε = Σ_{t=1}^α C(α,t)(-1)^{t-1} φ_ε * f(· - t·)`
//! and finite differences.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Tensor Gauss–Legendre order per axis for `d ≤ 3`.
pub const TENSOR_ORDER: usize = 24;
/// Point count of the low-discrepancy rule for `d > 3`.
pub const QMC_POINTS: usize = 1 << 16;

/// Unnormalized bump `exp(-1/(1-|z|²))` on the open unit ball.
fn bump(z: &[f64]) -> f64 {
    let q = 1.0 - z.iter().map(|v| v * v).sum::<f64>();
    if q > 0.0 {
        (-1.0 / q).exp()
    } else {
        0.0
    }
}

/// Points `z_k` in the unit ball with weights `w_k ∝ φ(z_k)` summing to 1.
#[derive(Debug, Clone)]
struct BallRule {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl BallRule {
    /// Returns the rule and the raw integral `∫ exp(-1/(1-|z|²)) dz` it implies.
    fn from_weighted(points: Vec<Vec<f64>>, raw: Vec<f64>) -> (BallRule, f64) {
        let (points, raw): (Vec<_>, Vec<_>) =
            points.into_iter().zip(raw).filter(|(_, w)| *w > 0.0).unzip();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        (BallRule { points, weights }, total)
    }

    fn tensor(d: usize, order: usize) -> Result<(BallRule, f64)> {
        let gl = gauss_legendre(order)?;
        let mut points = Vec::new();
        let mut raw = Vec::new();
        let mut idx = vec![0usize; d];
        loop {
            let z: Vec<f64> = idx.iter().map(|&k| gl.nodes[k]).collect();
            let w: f64 = idx.iter().map(|&k| gl.weights[k]).product();
            let b = bump(&z);
            if b > 0.0 {
                raw.push(w * b);
                points.push(z);
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return Ok(Self::from_weighted(points, raw));
                }
                idx[axis] += 1;
                if idx[axis] < order {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Additive recurrence with generator `1/φ_d^k`, `φ_d^{d+1} = φ_d + 1`,
    /// mapped to `[-1,1]^d` and symmetrized by antithetic pairs.
    fn quasi_mc(d: usize, n: usize) -> (BallRule, f64) {
        let mut g = 2.0f64;
        for _ in 0..64 {
            g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
        }
        let alpha: Vec<f64> = (1..=d).map(|k| g.powi(-(k as i32))).collect();
        let cube = 2f64.powi(d as i32);
        let mut points = Vec::with_capacity(n);
        let mut raw = Vec::with_capacity(n);
        for k in 0..n / 2 {
            let z: Vec<f64> =
                alpha.iter().map(|a| 2.0 * (0.5 + a * (k + 1) as f64).fract() - 1.0).collect();
            let b = bump(&z) * cube / n as f64;
            raw.push(b);
            raw.push(b);
            points.push(z.iter().map(|v| -v).collect());
            points.push(z);
        }
        Self::from_weighted(points, raw)
    }

    fn convolve(&self, f: &impl Fn(&[f64]) -> f64, x: &[f64], scale: f64, buf: &mut [f64]) -> f64 {
        let mut acc = 0.0;
        for (z, w) in self.points.iter().zip(&self.weights) {
            for ((b, xi), zi) in buf.iter_mut().zip(x).zip(z) {
                *b = xi - scale * zi;
            }
            acc += w * f(buf);
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct MollifierSpec {
    d: usize,
    epsilon: f64,
    alpha: u32,
    norm_const: f64,
    rule: Arc<BallRule>,
    /// Coarser rule whose disagreement with `rule` is the error estimate.
    check: Arc<BallRule>,
}

impl MollifierSpec {
    pub fn new(d: usize, epsilon: f64, alpha: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if alpha == 0 {
            return Err(Error::InvalidParameter("alpha must be >= 1".into()));
        }
        let ((rule, raw), (check, _)) = if d <= 3 {
            (BallRule::tensor(d, TENSOR_ORDER)?, BallRule::tensor(d, TENSOR_ORDER / 2)?)
        } else {
            (BallRule::quasi_mc(d, QMC_POINTS), BallRule::quasi_mc(d, QMC_POINTS / 2))
        };
        Ok(MollifierSpec {
            d,
            epsilon,
            alpha,
            norm_const: 1.0 / raw,
            rule: Arc::new(rule),
            check: Arc::new(check),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// `c_d` with `φ = c_d exp(-1/(1-|z|²))` integrating to 1.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// `φ(z)`.
    pub fn phi(&self, z: &[f64]) -> f64 {
        self.norm_const * bump(z)
    }

    /// `∫ φ` under the stored rule.
    pub fn total_mass(&self) -> f64 {
        self.rule.weights.iter().sum()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub struct Mollified<'a, F> {
    f: F,
    spec: &'a MollifierSpec,
}

/// `f_ε` for `f` on `ℝ^d`.
pub fn mollified_approx<F: Fn(&[f64]) -> f64>(f: F, spec: &MollifierSpec) -> Mollified<'_, F> {
    Mollified { f, spec }
}

impl<F: Fn(&[f64]) -> f64> Mollified<'_, F> {
    fn eval_with(&self, rule: &BallRule, x: &[f64]) -> f64 {
        let a = self.spec.alpha;
        let mut buf = vec![0.0; x.len()];
        (1..=a)
            .map(|t| {
                let sign = if t % 2 == 1 { 1.0 } else { -1.0 };
                let scale = t as f64 * self.spec.epsilon;
                sign * binomial(a, t) * rule.convolve(&self.f, x, scale, &mut buf)
            })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.spec.d {
            return Err(Error::DimensionMismatch { expected: self.spec.d, got: x.len() });
        }
        Ok(self.eval_with(&self.spec.rule, x))
    }

    /// Value and a quadrature error estimate from a coarser rule.
    pub fn eval_with_error(&self, x: &[f64]) -> Result<(f64, f64)> {
        let v = self.eval(x)?;
        Ok((v, (v - self.eval_with(&self.spec.check, x)).abs()))
    }

    /// Like [`Self::eval`] but fails when the error estimate exceeds `tol`.
    pub fn eval_checked(&self, x: &[f64], tol: f64) -> Result<f64> {
        let (v, err) = self.eval_with_error(x)?;
        if err > tol {
            return Err(Error::Quadrature(format!(
                "mollifier quadrature error estimate {err:.3e} exceeds {tol:.3e}"
            )));
        }
        Ok(v)
    }
}

/// `Δ_y^α f(x) = Σ_{t=0}^α C(α,t)(-1)^t f(x - t y)`.
pub fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, y: Vec<f64>, alpha: u32) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| {
        let mut buf = vec![0.0; x.len()];
        (0..=alpha)
            .map(|t| {
                for ((b, xi), yi) in buf.iter_mut().zip(x).zip(&y) {
                    *b = xi - t as f64 * yi;
                }
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(alpha, t) * f(&buf)
            })
            .sum()
    }
}
