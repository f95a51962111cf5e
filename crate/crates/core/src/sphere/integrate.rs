//! One-dimensional reduction of integrals of zonal functions over `S^d`:
//! `∫ h(u·e) dτ_d(u) = (ω_{d-1}/ω_d) ∫_{-1}^{1} h(t) (1-t²)^{(d-2)/2} dt`.

use crate::error::{Error, Result};
use crate::quad::{cached_rule, Adaptive};

use super::gegenbauer::{area_ratio, SphereDim};

/// Structural hints about a profile `h` on `[-1, 1]` that the quadrature
/// exploits: interior breakpoints (kinks, jumps) and an algebraic pole
/// `(1-t)^{-pole}` at the north pole that is folded into the Jacobi weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileShape {
    pub breakpoints: Vec<f64>,
    pub pole: f64,
}

impl ProfileShape {
    pub fn smooth() -> Self {
        ProfileShape::default()
    }

    pub fn with_breakpoints(breakpoints: Vec<f64>) -> Self {
        ProfileShape { breakpoints, pole: 0.0 }
    }
}

/// A quadrature for `∫_{-1}^{1} g(t) (1-t)^{a+pole} (1+t)^a dt`, assembled
/// from Gauss–Jacobi pieces between breakpoints. `eval` receives the regular
/// part `g`; returned weights already contain the singular factors.
#[derive(Debug, Clone)]
pub struct ZonalRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ZonalRule {
    /// Rule with `order` nodes per segment.
    pub fn build(d: SphereDim, shape: &ProfileShape, order: usize) -> Result<ZonalRule> {
        let a = d.weight_exponent();
        let mut cuts: Vec<f64> = shape
            .breakpoints
            .iter()
            .copied()
            .filter(|&c| c > -1.0 && c < 1.0)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(-1.0);
        edges.extend(cuts);
        edges.push(1.0);

        let upper_exp = a - shape.pole;
        if upper_exp <= -1.0 {
            return Err(Error::Quadrature(format!(
                "pole exponent {} is not integrable against the sphere weight",
                shape.pole
            )));
        }

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let segments = edges.len() - 1;
        for k in 0..segments {
            let (lo, hi) = (edges[k], edges[k + 1]);
            let half = (hi - lo) / 2.0;
            let touches_bottom = k == 0;
            let touches_top = k == segments - 1;
            // Jacobi exponents: (1-x) carries the factor at t = hi, (1+x) at t = lo
            let alpha = if touches_top { upper_exp } else { 0.0 };
            let beta = if touches_bottom { a } else { 0.0 };
            let rule = cached_rule(order, alpha, beta)?;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let t = lo + half * (1.0 + x);
                // singular factors handled by the rule pick up the map's Jacobian:
                // (1-t) = half (1-x), (1+t) = half (1+x)
                let mut scale = half * half.powf(alpha) * half.powf(beta);
                if !touches_top {
                    scale *= (1.0 - t).powf(upper_exp);
                }
                if !touches_bottom {
                    scale *= (1.0 + t).powf(a);
                }
                nodes.push(t);
                weights.push(w * scale);
            }
        }
        Ok(ZonalRule { nodes, weights })
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }
}

/// `(ω_{d-1}/ω_d) ∫ g(t) (1-t)^{-pole} (1-t²)^{(d-2)/2} dt`, doubling the
/// order until successive estimates agree.
pub fn zonal_mean(
    d: SphereDim,
    shape: &ProfileShape,
    schedule: &Adaptive,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    let c = area_ratio(d);
    schedule.run(|order| Ok(c * ZonalRule::build(d, shape, order)?.integrate(&g)))
}
