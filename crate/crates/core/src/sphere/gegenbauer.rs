//! Sphere geometry and normalized Gegenbauer polynomials on `S^d ⊂ ℝ^{d+1}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Intrinsic dimension `d >= 2` of the sphere `S^d` in `ℝ^{d+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct SphereDim(usize);

impl SphereDim {
    pub fn new(d: usize) -> Result<Self> {
        if d >= 2 {
            Ok(SphereDim(d))
        } else {
            Err(Error::InvalidParameter(format!("sphere dimension must be >= 2, got {d}")))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Exponent `(d-2)/2` of the weight `(1-t²)^{(d-2)/2}`.
    pub fn weight_exponent(self) -> f64 {
        (self.0 as f64 - 2.0) / 2.0
    }
}

impl TryFrom<usize> for SphereDim {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        SphereDim::new(d)
    }
}

impl From<SphereDim> for usize {
    fn from(d: SphereDim) -> usize {
        d.0
    }
}

/// Surface area `ω_d = 2π^{(d+1)/2} / Γ((d+1)/2)` of the unit sphere `S^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// `ω_{d-1} / ω_d = Γ((d+1)/2) / (√π Γ(d/2))`, the normalizing constant of
/// the pushforward of `τ_d` under `u ↦ u·e`.
pub fn area_ratio(d: SphereDim) -> f64 {
    let d = d.get() as f64;
    (ln_gamma((d + 1.0) / 2.0) - ln_gamma(d / 2.0)).exp() / PI.sqrt()
}

/// Dimension `N(d, i)` of the degree-`i` spherical harmonics on `S^d`.
pub fn harmonic_dim(d: SphereDim, i: usize) -> u64 {
    if i == 0 {
        return 1;
    }
    let d = d.get() as u128;
    let i = i as u128;
    // C(i+d-2, d-1), built incrementally so every intermediate is an integer
    let mut binom: u128 = 1;
    for k in 1..d {
        binom = binom * (i - 1 + k) / k;
    }
    let n = (2 * i + d - 1) * binom / i;
    u64::try_from(n).expect("harmonic dimension overflows u64")
}

/// Floating point [`harmonic_dim`] for use in spectral sums.
pub fn harmonic_dim_f64(d: SphereDim, i: usize) -> f64 {
    harmonic_dim(d, i) as f64
}

/// `P_i(t)` normalized so that `P_i(1) = 1`, by the three-term recurrence
/// `(i+d-1) P_{i+1} = (2i+d-1) t P_i - i P_{i-1}`.
pub fn gegenbauer_eval(d: SphereDim, i: usize, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("Gegenbauer argument must lie in [-1, 1], got {t}")));
    }
    let mut out = vec![0.0; i + 1];
    gegenbauer_all(d, t, &mut out);
    Ok(out[i])
}

/// Fill `out[k] = P_k(t)` for `k = 0..out.len()`. No domain check.
pub fn gegenbauer_all(d: SphereDim, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    let dm1 = d.get() as f64 - 1.0;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + dm1) * t * out[k] - kf * out[k - 1]) / (kf + dm1);
    }
}
