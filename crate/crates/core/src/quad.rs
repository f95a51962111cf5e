//! Gauss–Jacobi quadrature via the Golub–Welsch eigenvalue method.
//!
//! A rule of order `n` integrates `∫_{-1}^{1} (1-x)^α (1+x)^β p(x) dx` exactly
//! for polynomials `p` of degree `< 2n`. Rules are cached per `(n, α, β)`
//! behind a read-mostly lock so concurrent readers never block each other.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]` for the weight `(1-x)^α (1+x)^β`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ_k w_k f(x_k)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Compute the order-`n` Gauss–Jacobi rule.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Jacobi exponents must exceed -1, got alpha={alpha}, beta={beta}"
        )));
    }
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (k, d) in diag.iter_mut().enumerate() {
        let k = k as f64;
        *d = if k == 0.0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            let c = 2.0 * k + ab;
            (beta * beta - alpha * alpha) / (c * (c + 2.0))
        };
    }
    for k in 1..n {
        let kf = k as f64;
        let b2 = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let c = 2.0 * kf + ab;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
        };
        off[k] = b2.sqrt();
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();

    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights, alpha, beta })
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
/// row of the eigenvector matrix (all Golub–Welsch needs).
///
/// `diag` receives the eigenvalues; `off[k]` couples rows `k-1` and `k`.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    // shift so that e[i] couples i and i+1
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Quadrature("tridiagonal eigensolver did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached [`gauss_jacobi`].
pub fn cached_rule(n: usize, alpha: f64, beta: f64) -> Result<Arc<GaussRule>> {
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(n, alpha, beta)?);
    let mut cache = rule_cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(rule)))
}

/// Cached Gauss–Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> Result<Arc<GaussRule>> {
    cached_rule(n, 0.0, 0.0)
}

/// Doubling schedule shared by the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub start_order: usize,
    pub max_order: usize,
    /// Successive estimates must agree to `abs_tol + rel_tol·|estimate|`.
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { start_order: 32, max_order: 1 << 14, abs_tol: 1e-10, rel_tol: 0.0 }
    }
}

impl Adaptive {
    /// Double the order until `estimate(order)` stabilizes. Returns the last
    /// estimate; fails when `max_order` is reached without agreement.
    pub fn run(&self, mut estimate: impl FnMut(usize) -> Result<f64>) -> Result<f64> {
        let mut order = self.start_order.max(1);
        let mut prev = estimate(order)?;
        while order < self.max_order {
            order = (order * 2).min(self.max_order);
            let next = estimate(order)?;
            if !next.is_finite() {
                return Err(Error::Quadrature(format!("non-finite estimate at order {order}")));
            }
            if (next - prev).abs() <= self.abs_tol + self.rel_tol * next.abs() {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature(format!(
            "no agreement to {:e} (abs) / {:e} (rel) by order {}",
            self.abs_tol, self.rel_tol, self.max_order
        )))
    }

    /// Vector version: every component must stabilize.
    pub fn run_vec(&self, mut estimate: impl FnMut(usize) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let mut order = self.start_order.max(1);
        let mut prev = estimate(order)?;
        let mut last_gap = f64::INFINITY;
        while order < self.max_order {
            order = (order * 2).min(self.max_order);
            let next = estimate(order)?;
            let mut ok = true;
            last_gap = 0.0;
            for (a, b) in prev.iter().zip(&next) {
                if !b.is_finite() {
                    return Err(Error::Quadrature(format!("non-finite estimate at order {order}")));
                }
                let gap = (a - b).abs();
                last_gap = last_gap.max(gap);
                if gap > self.abs_tol + self.rel_tol * b.abs() {
                    ok = false;
                }
            }
            if ok {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature(format!(
            "largest disagreement {last_gap:e} at max order {}",
            self.max_order
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_orders() {
        let r = gauss_jacobi(2, 0.0, 0.0).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-14);
        let r = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_polynomials_with_jacobi_weight() {
        // ∫ (1-x)^a (1+x)^b x^k against a closed form via Beta functions:
        // substitute x = 2u - 1.
        let beta_fn = |p: f64, q: f64| (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp();
        for &(a, b) in &[(0.0, 0.0), (0.5, 0.0), (-0.5, 0.5), (1.5, 2.0), (0.0, -0.5)] {
            let rule = gauss_jacobi(12, a, b).unwrap();
            for k in 0..20usize {
                // (1+x)^k expands the monomial basis; ∫(1-x)^a(1+x)^{b+k} = 2^{a+b+k+1} B(a+1, b+k+1)
                let got = rule.integrate(|x| (1.0 + x).powi(k as i32));
                let want = 2f64.powf(a + b + k as f64 + 1.0) * beta_fn(a + 1.0, b + k as f64 + 1.0);
                assert!((got - want).abs() <= 1e-12 * want, "a={a} b={b} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn large_order_weights_sum_to_mass() {
        let rule = gauss_jacobi(2048, 0.5, 0.0).unwrap();
        let mass = 2f64.powf(1.5) / 1.5;
        assert!((rule.weights.iter().sum::<f64>() - mass).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cache_returns_shared_rule() {
        let a = cached_rule(40, 0.5, 0.5).unwrap();
        let b = cached_rule(40, 0.5, 0.5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let sched = Adaptive { start_order: 4, max_order: 64, abs_tol: 1e-14, rel_tol: 0.0 };
        // |x|^{0.3} has a cusp, so Legendre converges only algebraically
        let res = sched.run(|n| Ok(gauss_legendre(n)?.integrate(|x| x.abs().powf(0.3))));
        assert!(matches!(res, Err(Error::Quadrature(_))));
        let ok = sched.run(|n| Ok(gauss_legendre(n)?.integrate(|x| x.exp())));
        assert!((ok.unwrap() - (1f64.exp() - (-1f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }
}
