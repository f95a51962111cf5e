//! Closed-form smooth test functions on `ℝ^d` with hand-derived first and
//! second derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SobolevKind {
    /// `exp(-|x|²/width²)`.
    GaussianBump { width: f64 },
    /// `(1 + Σ x_i) exp(-|x|²)`.
    PolyBump,
    /// `Π cos(freq · x_i)`.
    CosineProduct { freq: f64 },
    /// `slope·x + offset`.
    Affine { slope: Vec<f64>, offset: f64 },
    /// `exp(-1/(1 - |x|²/radius²))` inside the ball of `radius`, 0 outside.
    CompactBump { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevTarget {
    pub d: usize,
    pub kind: SobolevKind,
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

impl SobolevTarget {
    pub fn new(d: usize, kind: SobolevKind) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let ok = match &kind {
            SobolevKind::GaussianBump { width } => *width > 0.0 && width.is_finite(),
            SobolevKind::PolyBump => true,
            SobolevKind::CosineProduct { freq } => freq.is_finite(),
            SobolevKind::Affine { slope, offset } => {
                if slope.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: slope.len() });
                }
                offset.is_finite() && slope.iter().all(|v| v.is_finite())
            }
            SobolevKind::CompactBump { radius } => *radius > 0.0 && radius.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid Sobolev target parameters {kind:?}")));
        }
        Ok(SobolevTarget { d, kind })
    }

    /// Radius of a ball containing the support, if bounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            SobolevKind::CompactBump { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        match &self.kind {
            SobolevKind::GaussianBump { width } => (-norm2(x) / (width * width)).exp(),
            SobolevKind::PolyBump => (1.0 + x.iter().sum::<f64>()) * (-norm2(x)).exp(),
            SobolevKind::CosineProduct { freq } => x.iter().map(|v| (freq * v).cos()).product(),
            SobolevKind::Affine { slope, offset } => {
                offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            }
            SobolevKind::CompactBump { radius } => {
                let q = 1.0 - norm2(x) / (radius * radius);
                if q > 0.0 {
                    (-1.0 / q).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let f = self.value(x);
        match &self.kind {
            SobolevKind::GaussianBump { width } => {
                let c = -2.0 / (width * width);
                x.iter().map(|v| c * v * f).collect()
            }
            SobolevKind::PolyBump => {
                let p = 1.0 + x.iter().sum::<f64>();
                let g = (-norm2(x)).exp();
                x.iter().map(|v| g * (1.0 - 2.0 * v * p)).collect()
            }
            SobolevKind::CosineProduct { freq } => (0..self.d)
                .map(|i| {
                    let others: f64 =
                        x.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, v)| (freq * v).cos()).product();
                    -freq * (freq * x[i]).sin() * others
                })
                .collect(),
            SobolevKind::Affine { slope, .. } => slope.clone(),
            SobolevKind::CompactBump { radius } => {
                let r2 = radius * radius;
                let q = 1.0 - norm2(x) / r2;
                if q <= 0.0 {
                    return vec![0.0; self.d];
                }
                x.iter().map(|v| -2.0 * v * f / (r2 * q * q)).collect()
            }
        }
    }

    /// Row-major `d × d` Hessian.
    pub fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        let f = self.value(x);
        let mut h = vec![0.0; d * d];
        match &self.kind {
            SobolevKind::GaussianBump { width } => {
                let w2 = width * width;
                for i in 0..d {
                    for j in 0..d {
                        let delta = if i == j { 2.0 / w2 } else { 0.0 };
                        h[i * d + j] = f * (4.0 * x[i] * x[j] / (w2 * w2) - delta);
                    }
                }
            }
            SobolevKind::PolyBump => {
                let p = 1.0 + x.iter().sum::<f64>();
                let g = (-norm2(x)).exp();
                for i in 0..d {
                    for j in 0..d {
                        let delta = if i == j { 2.0 * p } else { 0.0 };
                        h[i * d + j] = g * (4.0 * x[i] * x[j] * p - 2.0 * x[i] - 2.0 * x[j] - delta);
                    }
                }
            }
            SobolevKind::CosineProduct { freq } => {
                let c: Vec<f64> = x.iter().map(|v| (freq * v).cos()).collect();
                let s: Vec<f64> = x.iter().map(|v| (freq * v).sin()).collect();
                for i in 0..d {
                    for j in 0..d {
                        h[i * d + j] = if i == j {
                            -freq * freq * f
                        } else {
                            let rest: f64 = (0..d).filter(|&l| l != i && l != j).map(|l| c[l]).product();
                            freq * freq * s[i] * s[j] * rest
                        };
                    }
                }
            }
            SobolevKind::Affine { .. } => {}
            SobolevKind::CompactBump { radius } => {
                let r2 = radius * radius;
                let q = 1.0 - norm2(x) / r2;
                if q > 0.0 {
                    for i in 0..d {
                        for j in 0..d {
                            let delta = if i == j { -2.0 * f / (r2 * q * q) } else { 0.0 };
                            h[i * d + j] =
                                delta + 4.0 * x[i] * x[j] * f / (r2 * r2) * (q.powi(-4) - 2.0 * q.powi(-3));
                        }
                    }
                }
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;
    use rand::Rng;

    fn catalog(d: usize) -> Vec<SobolevTarget> {
        vec![
            SobolevTarget::new(d, SobolevKind::GaussianBump { width: 0.7 }).unwrap(),
            SobolevTarget::new(d, SobolevKind::PolyBump).unwrap(),
            SobolevTarget::new(d, SobolevKind::CosineProduct { freq: 2.5 }).unwrap(),
            SobolevTarget::new(d, SobolevKind::Affine { slope: (0..d).map(|i| i as f64 - 0.5).collect(), offset: 0.3 })
                .unwrap(),
            SobolevTarget::new(d, SobolevKind::CompactBump { radius: 1.5 }).unwrap(),
        ]
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = task_rng(5, 0);
        let h = 1e-5;
        for d in 1..4 {
            for t in catalog(d) {
                for _ in 0..20 {
                    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let g = t.gradient(&x);
                    let hess = t.hessian(&x);
                    for i in 0..d {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[i] += h;
                        xm[i] -= h;
                        let fd = (t.value(&xp) - t.value(&xm)) / (2.0 * h);
                        assert!((fd - g[i]).abs() < 1e-7, "{:?} grad {i}", t.kind);
                        let gp = t.gradient(&xp);
                        let gm = t.gradient(&xm);
                        for j in 0..d {
                            let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                            assert!((fd2 - hess[j * d + i]).abs() < 1e-6, "{:?} hess {i}{j}", t.kind);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn support_and_validation() {
        let t = SobolevTarget::new(2, SobolevKind::CompactBump { radius: 0.5 }).unwrap();
        assert_eq!(t.support_radius(), Some(0.5));
        assert_eq!(t.value(&[0.4, 0.4]), 0.0);
        assert_eq!(t.value(&[0.0, 0.0]), (-1.0f64).exp());
        assert!(SobolevTarget::new(2, SobolevKind::GaussianBump { width: 0.0 }).is_err());
        assert!(SobolevTarget::new(2, SobolevKind::Affine { slope: vec![1.0], offset: 0.0 }).is_err());
        let json = r#"{"kind":"gaussian_bump","width":1.0}"#;
        let k: SobolevKind = serde_json::from_str(json).unwrap();
        assert_eq!(k, SobolevKind::GaussianBump { width: 1.0 });
    }
}
