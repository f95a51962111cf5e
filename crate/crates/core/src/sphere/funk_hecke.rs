//! Funk–Hecke multipliers of the zonal kernel `σ_s(θ·u)` on `S^d`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::net::ReluOrder;
use crate::quad::cached_rule;

use super::gegenbauer::{area_ratio, gegenbauer_all, harmonic_dim, SphereDim};

/// Agreement target between consecutive quadrature orders.
const TARGET_TOL: f64 = 1e-13;
/// Disagreement above this at the maximal order is a hard failure.
const FAIL_TOL: f64 = 1e-9;
/// Entries that vanish by parity are snapped to zero below this magnitude.
pub const PARITY_SNAP_TOL: f64 = 1e-10;
const MAX_ORDER: usize = 1 << 14;

/// `λ_i = (ω_{d-1}/ω_d) ∫ σ_s(t) P_i(t) (1-t²)^{(d-2)/2} dt` for `i = 0..=I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunkHeckeSpectrum {
    d: SphereDim,
    s: ReluOrder,
    lambdas: Vec<f64>,
}

/// True when `λ_i` vanishes identically: `i ≡ s (mod 2)` and `i ≥ s+1`.
pub fn parity_vanishes(s: ReluOrder, i: usize) -> bool {
    let s = s.get() as usize;
    i > s && (i - s) % 2 == 0
}

impl FunkHeckeSpectrum {
    pub fn dim(&self) -> SphereDim {
        self.d
    }

    pub fn order(&self) -> ReluOrder {
        self.s
    }

    pub fn max_degree(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `λ_i`, or `None` beyond the computed range.
    pub fn lambda(&self, i: usize) -> Option<f64> {
        self.lambdas.get(i).copied()
    }

    /// CSV with header `i,N(d,i),lambda_i`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,N(d,i),lambda_i\n");
        for (i, l) in self.lambdas.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{l:e}", harmonic_dim(self.d, i));
        }
        out
    }
}

/// Compute `λ_0..=λ_maxdeg`. The integrand lives on `[0, 1]`; the substitution
/// `t = (1+x)/2` turns `t^s (1-t)^a` into a Gauss–Jacobi weight with
/// `α = (d-2)/2`, `β = s`, leaving the smooth factor `P_i(t) (1+t)^a`.
pub fn funk_hecke_coeff(d: SphereDim, s: ReluOrder, maxdeg: usize) -> Result<FunkHeckeSpectrum> {
    let a = d.weight_exponent();
    let beta = s.get() as f64;
    let pref = area_ratio(d) * 0.5f64.powf(1.0 + a + beta);
    let len = maxdeg + 1;

    let estimate = |order: usize| -> Result<Vec<f64>> {
        let rule = cached_rule(order, a, beta)?;
        let mut acc = vec![0.0; len];
        let mut p = vec![0.0; len];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (1.0 + x);
            gegenbauer_all(d, t, &mut p);
            let g = w * (1.0 + t).powf(a);
            for (acc, &pi) in acc.iter_mut().zip(&p) {
                *acc += g * pi;
            }
        }
        Ok(acc.into_iter().map(|v| v * pref).collect())
    };

    let mut order = (len / 2 + 16).next_power_of_two().clamp(32, MAX_ORDER);
    let mut prev = estimate(order)?;
    let mut lambdas = loop {
        let next_order = (order * 2).min(MAX_ORDER);
        let next = estimate(next_order)?;
        let gap = prev
            .iter()
            .zip(&next)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        if !gap.is_finite() {
            return Err(Error::Quadrature("non-finite Funk–Hecke estimate".into()));
        }
        if gap <= TARGET_TOL || (next_order == MAX_ORDER && gap <= FAIL_TOL) {
            break next;
        }
        if next_order == MAX_ORDER {
            return Err(Error::Quadrature(format!(
                "Funk–Hecke coefficients disagree by {gap:e} at order {MAX_ORDER}"
            )));
        }
        order = next_order;
        prev = next;
    };

    for (i, l) in lambdas.iter_mut().enumerate() {
        if parity_vanishes(s, i) {
            if l.abs() >= PARITY_SNAP_TOL {
                return Err(Error::Quadrature(format!(
                    "λ_{i} should vanish by parity but quadrature gives {l:e}"
                )));
            }
            *l = 0.0;
        }
    }
    Ok(FunkHeckeSpectrum { d, s, lambdas })
}

/// Gamma-function expression commonly quoted for `λ_i`: defined for `i = 0`
/// and for `i ≥ s+1`; `None` for the low modes `1 ≤ i ≤ s`. For `i ≥ s+1` the
/// expression is evaluated as printed, without a sign or the area-ratio
/// prefactor, so it need not equal [`funk_hecke_coeff`].
pub fn closed_form_lambda(d: SphereDim, s: ReluOrder, i: usize) -> Option<f64> {
    let df = d.get() as f64;
    let sf = s.get() as f64;
    if i == 0 {
        let v = ln_gamma(df / 2.0) + ln_gamma((sf + 1.0) / 2.0) - ln_gamma((sf + df + 1.0) / 2.0);
        return Some(area_ratio(d) * v.exp() / 2.0);
    }
    if i <= s.get() as usize {
        return None;
    }
    if parity_vanishes(s, i) {
        return Some(0.0);
    }
    let fi = i as f64;
    let v = ln_gamma(df / 2.0) + ln_gamma(fi - sf)
        - ln_gamma((fi - sf + 1.0) / 2.0)
        - ln_gamma((fi + df + sf + 1.0) / 2.0);
    Some(v.exp())
}
