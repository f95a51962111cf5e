//! Maps between functions on the unit ball `B^d` and on the upper cap of `S^d`.

use crate::error::{Error, Result};
use crate::net::ReluOrder;

/// Lowest admissible last coordinate on the cap, `√2/2`.
pub const CAP_HEIGHT: f64 = std::f64::consts::FRAC_1_SQRT_2;
const CAP_SLACK: f64 = 1e-12;

/// `f̃(u) = u_{d+1}^s f(u'/u_{d+1})` on the cap `u_{d+1} ≥ √2/2`.
pub fn lift_to_sphere<F>(f: F, s: ReluOrder) -> impl Fn(&[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    move |u: &[f64]| {
        let (last, head) = match u.split_last() {
            Some((l, h)) if !h.is_empty() => (*l, h),
            _ => return Err(Error::Domain("sphere point needs at least two coordinates".into())),
        };
        let norm2: f64 = u.iter().map(|v| v * v).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("point is not on the unit sphere (|u|² = {norm2})")));
        }
        if last < CAP_HEIGHT - CAP_SLACK {
            return Err(Error::Domain(format!("u_(d+1) = {last} is below the cap height √2/2")));
        }
        let x: Vec<f64> = head.iter().map(|v| v / last).collect();
        Ok(last.powi(s.as_i32()) * f(&x))
    }
}

/// `u_x = (x, 1) / sqrt(|x|² + 1)`.
pub fn sphere_point(x: &[f64]) -> Vec<f64> {
    let r = (x.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt();
    x.iter().map(|v| v / r).chain(std::iter::once(1.0 / r)).collect()
}

/// `g*(x) = (|x|² + 1)^{s/2} g(u_x)`.
pub fn reverse_map<G>(g: G, s: ReluOrder) -> impl Fn(&[f64]) -> f64
where
    G: Fn(&[f64]) -> f64,
{
    move |x: &[f64]| {
        let q = x.iter().map(|v| v * v).sum::<f64>() + 1.0;
        q.powf(s.get() as f64 / 2.0) * g(&sphere_point(x))
    }
}
