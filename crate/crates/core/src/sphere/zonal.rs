//! Zonal functions on `S^d` stored as Gegenbauer coefficients, and the
//! spectral operators that act diagonally on them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Adaptive;

use super::funk_hecke::FunkHeckeSpectrum;
use super::gegenbauer::{area_ratio, gegenbauer_all, harmonic_dim_f64, SphereDim};
use super::integrate::{ProfileShape, ZonalRule};

/// `g(u) = Σ_i ĥ_i N(d,i) P_i(u·e)`. The degree-`i` component has squared
/// `L²(τ_d)` norm `N(d,i) ĥ_i²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalSpectrum {
    d: SphereDim,
    coeffs: Vec<f64>,
}

impl ZonalSpectrum {
    pub fn new(d: SphereDim, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("zonal spectrum needs at least one mode".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("zonal coefficients must be finite".into()));
        }
        Ok(ZonalSpectrum { d, coeffs })
    }

    pub fn zeros(d: SphereDim, maxdeg: usize) -> Self {
        ZonalSpectrum { d, coeffs: vec![0.0; maxdeg + 1] }
    }

    /// `ĥ_k = value`, all other modes zero, padded to `maxdeg`.
    pub fn single_mode(d: SphereDim, k: usize, value: f64, maxdeg: usize) -> Self {
        let mut coeffs = vec![0.0; maxdeg.max(k) + 1];
        coeffs[k] = value;
        ZonalSpectrum { d, coeffs }
    }

    pub fn dim(&self) -> SphereDim {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// `‖g_i‖_{L²(τ_d)}` for every mode.
    pub fn mode_norms(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * harmonic_dim_f64(self.d, i).sqrt())
            .collect()
    }

    /// Profile value at `t = u·e`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("zonal argument must lie in [-1, 1], got {t}")));
        }
        let mut p = vec![0.0; self.coeffs.len()];
        gegenbauer_all(self.d, t, &mut p);
        Ok(self.synthesize(&p))
    }

    pub(crate) fn synthesize(&self, p: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(p)
            .enumerate()
            .map(|(i, (c, pi))| c * harmonic_dim_f64(self.d, i) * pi)
            .sum()
    }

    fn map_modes(&self, f: impl Fn(usize, f64) -> f64) -> ZonalSpectrum {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        ZonalSpectrum { d: self.d, coeffs }
    }

    pub fn sub(&self, other: &ZonalSpectrum) -> Result<ZonalSpectrum> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d.get(), got: other.d.get() });
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Ok(ZonalSpectrum { d: self.d, coeffs })
    }

    /// CSV with header `i,coeff`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,coeff\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{i},{c:e}");
        }
        out
    }
}

/// `ĥ_i = (ω_{d-1}/ω_d) ∫ h(t) P_i(t) (1-t²)^{(d-2)/2} dt` for one degree.
/// `h = (1-t)^{-shape.pole} · g`; the caller passes the regular part `g`.
pub fn project_zonal(
    d: SphereDim,
    i: usize,
    shape: &ProfileShape,
    schedule: &Adaptive,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    let c = area_ratio(d);
    let mut p = vec![0.0; i + 1];
    schedule.run(|order| {
        let rule = ZonalRule::build(d, shape, order)?;
        let mut acc = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            gegenbauer_all(d, t, &mut p);
            acc += w * g(t) * p[i];
        }
        Ok(c * acc)
    })
}

/// All projections `ĥ_0..=ĥ_maxdeg` from one adaptive node sequence.
pub fn project_zonal_all(
    d: SphereDim,
    maxdeg: usize,
    shape: &ProfileShape,
    schedule: &Adaptive,
    g: impl Fn(f64) -> f64,
) -> Result<ZonalSpectrum> {
    let c = area_ratio(d);
    let len = maxdeg + 1;
    let schedule = Adaptive { start_order: schedule.start_order.max(len / 2 + 8), ..*schedule };
    let coeffs = schedule.run_vec(|order| {
        let rule = ZonalRule::build(d, shape, order)?;
        let mut acc = vec![0.0; len];
        let mut p = vec![0.0; len];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            gegenbauer_all(d, t, &mut p);
            let gw = w * g(t);
            for (a, pi) in acc.iter_mut().zip(&p) {
                *a += gw * pi;
            }
        }
        Ok(acc.into_iter().map(|v| v * c).collect())
    })?;
    ZonalSpectrum::new(d, coeffs)
}

/// Mode-wise product `λ_i â_i`.
pub fn apply_funk_hecke(spec: &FunkHeckeSpectrum, a: &ZonalSpectrum) -> Result<ZonalSpectrum> {
    check_aligned(spec, a)?;
    Ok(a.map_modes(|i, c| spec.lambdas()[i] * c))
}

fn check_aligned(spec: &FunkHeckeSpectrum, g: &ZonalSpectrum) -> Result<()> {
    if spec.dim() != g.d {
        return Err(Error::DimensionMismatch { expected: spec.dim().get(), got: g.d.get() });
    }
    if spec.max_degree() < g.max_degree() {
        return Err(Error::DimensionMismatch {
            expected: spec.max_degree() + 1,
            got: g.max_degree() + 1,
        });
    }
    Ok(())
}

/// `‖g‖_{L²(τ_d)} = sqrt(Σ N(d,i) ĥ_i²)`.
pub fn parseval_norm(g: &ZonalSpectrum) -> f64 {
    g.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| harmonic_dim_f64(g.d, i) * c * c)
        .sum::<f64>()
        .sqrt()
}

/// `sqrt(Σ_{λ_i≠0} N(d,i) ĥ_i² / λ_i²)`; `+∞` if `g` has mass on a mode with
/// `λ_i = 0`.
pub fn f2_norm(spec: &FunkHeckeSpectrum, g: &ZonalSpectrum) -> Result<f64> {
    check_aligned(spec, g)?;
    let mut acc = 0.0;
    for (i, &c) in g.coeffs.iter().enumerate() {
        let l = spec.lambdas()[i];
        if l == 0.0 {
            if c != 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        acc += harmonic_dim_f64(g.d, i) * c * c / (l * l);
    }
    Ok(acc.sqrt())
}

/// `T_β g`: mode `i` scaled by `P_i(cos β)`.
pub fn translate(g: &ZonalSpectrum, beta: f64) -> ZonalSpectrum {
    let mut p = vec![0.0; g.coeffs.len()];
    gegenbauer_all(g.d, beta.cos(), &mut p);
    g.map_modes(|i, c| p[i] * c)
}

/// `‖Δ^α_β g‖_{L²} = sqrt(Σ (1-P_i(cos β))^α N(d,i) ĥ_i²)`.
pub fn difference_norm(g: &ZonalSpectrum, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(Error::Domain(format!("beta must lie in (0, π), got {beta}")));
    }
    let mut p = vec![0.0; g.coeffs.len()];
    gegenbauer_all(g.d, beta.cos(), &mut p);
    let sum: f64 = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 - p[i]).max(0.0).powf(alpha) * harmonic_dim_f64(g.d, i) * c * c)
        .sum();
    Ok(sum.sqrt())
}

/// Points in the β grid used by [`modulus_of_smoothness`].
pub const MODULUS_GRID: usize = 64;

/// `ω_α(g, t)_2`, estimated from below as the max of [`difference_norm`] over
/// `MODULUS_GRID` log-spaced angles in `(t/100, t]`.
pub fn modulus_of_smoothness(g: &ZonalSpectrum, alpha: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < std::f64::consts::PI) {
        return Err(Error::Domain(format!("t must lie in (0, π), got {t}")));
    }
    let lo = t / 100.0;
    let mut best = 0.0f64;
    for k in 1..=MODULUS_GRID {
        let beta = lo * 100f64.powf(k as f64 / MODULUS_GRID as f64);
        best = best.max(difference_norm(g, alpha, beta.min(t))?);
    }
    Ok(best)
}

/// Mode `i` scaled by `(i(i+d-1))^{α/2}`. Mode 0 is sent to 0 unless `α = 0`,
/// so negative `α` acts as a pseudo-inverse.
pub fn laplace_multiplier(g: &ZonalSpectrum, alpha: f64) -> ZonalSpectrum {
    if alpha == 0.0 {
        return g.clone();
    }
    let dm1 = g.d.get() as f64 - 1.0;
    g.map_modes(|i, c| {
        if i == 0 {
            0.0
        } else {
            let fi = i as f64;
            (fi * (fi + dm1)).powf(alpha / 2.0) * c
        }
    })
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, nonincreasing in between.
pub fn cutoff_eta(t: f64) -> f64 {
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let (a, b) = (psi(2.0 - t), psi(t - 1.0));
    a / (a + b)
}

/// Mode `i` scaled by `η(i/j)`; degree at most `2j - 1`.
pub fn filtered_approx(g: &ZonalSpectrum, j: usize) -> Result<ZonalSpectrum> {
    if j == 0 {
        return Err(Error::InvalidParameter("filter index j must be >= 1".into()));
    }
    Ok(g.map_modes(|i, c| if i >= 2 * j { 0.0 } else { cutoff_eta(i as f64 / j as f64) * c }))
}
