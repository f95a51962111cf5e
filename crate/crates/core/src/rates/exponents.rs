//! Decay exponents of the approximation and generalization bounds, in the
//! positive convention (`error ≲ m^{-value}` or `n^{-value}`).
//!
//! Every formula is written once over [`Scalar`] and evaluated both in exact
//! rational arithmetic (when the inputs are small-denominator rationals) and
//! in `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Ordered field used to evaluate the exponent formulas.
pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn int(v: i64) -> Self;
}

impl Scalar for f64 {
    fn int(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Rational {
    fn int(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

fn n<T: Scalar>(v: i64) -> T {
    T::int(v)
}

/// `p* = (2d+2)/(d+3)`.
pub fn p_star<T: Scalar>(d: usize) -> T {
    let d = d as i64;
    n::<T>(2 * d + 2) / n(d + 3)
}

/// `ζ(p)`: `d(1/p - 1/2) - 1/2` for `p ≤ p*`, `((d-1)/2)(1/p - 1/2)` above.
pub fn zeta<T: Scalar>(d: usize, p: T) -> T {
    let half = n::<T>(1) / n(2);
    let inv = n::<T>(1) / p.clone() - half.clone();
    let df = n::<T>(d as i64);
    if p <= p_star::<T>(d) {
        df * inv - half
    } else {
        (df - n(1)) / n(2) * inv
    }
}

/// `γ* = s + d/2 - ζ(p)`.
pub fn gamma_star<T: Scalar>(d: usize, s: u32, p: T) -> T {
    n::<T>(s as i64) + n::<T>(d as i64) / n(2) - zeta(d, p)
}

/// Rate in `R` of the `F̃_2`-ball approximation of an `L^p`-type function.
pub fn filtered_rate<T: Scalar>(d: usize, s: u32, p: T) -> T {
    let (di, si) = (d as i64, s as i64);
    if p <= p_star::<T>(d) {
        (p.clone() * n(2 * si + 2 * di + 1) - n(2 * di)) / (n::<T>(di) * (n::<T>(2) - p))
    } else {
        (p.clone() * n(4 * si + 3 * di - 1) - n(2 * di - 2))
            / (n::<T>(2 * di - 2) - p.clone() * n(di) + p * n(3))
    }
}

/// Rate in `m` for `L^p`-type targets, `1 ≤ p < 2`.
pub fn lp_approx<T: Scalar>(d: usize, s: u32, p: T) -> T {
    let (di, si) = (d as i64, s as i64);
    if p <= p_star::<T>(d) {
        (p.clone() * n(2 * si + 2 * di + 1) - n(2 * di)) / (n::<T>(2 * di) * p)
    } else {
        (p.clone() * n(4 * si + 3 * di - 1) - n(2 * di - 2)) / (n::<T>(4 * di) * p)
    }
}

/// `(2s+d+1)/(2d)`: rate in `m` at the `p = 2` endpoint.
pub fn lp_endpoint<T: Scalar>(d: usize, s: u32) -> T {
    n::<T>(2 * s as i64 + d as i64 + 1) / n(2 * d as i64)
}

/// Limit of [`lp_approx`] as `p → 2⁻`: `(2s+d)/(2d)`.
pub fn lp_left_limit<T: Scalar>(d: usize, s: u32) -> T {
    n::<T>(2 * s as i64 + d as i64) / n(2 * d as i64)
}

/// `1/2 + (2s+1)/(2d)`: uniform rate in `m` for Barron targets.
pub fn barron_approx<T: Scalar>(d: usize, s: u32) -> T {
    n::<T>(1) / n(2) + n::<T>(2 * s as i64 + 1) / n(2 * d as i64)
}

/// `(d+2s+1)/(2d+2s+1)`: generalization rate in `n` for Barron targets,
/// also the Barron minimax lower bound.
pub fn gen_barron<T: Scalar>(d: usize, s: u32) -> T {
    let (di, si) = (d as i64, s as i64);
    n::<T>(di + 2 * si + 1) / n(2 * di + 2 * si + 1)
}

/// `2α/(2α+d)`.
pub fn gen_sobolev<T: Scalar>(d: usize, alpha: T) -> T {
    let two_a = alpha * n(2);
    two_a.clone() / (two_a + n(d as i64))
}

/// `(d+2s+1)/2`: decay of `|λ_i|` in `i`.
pub fn funk_hecke_decay<T: Scalar>(d: usize, s: u32) -> T {
    n::<T>(d as i64 + 2 * s as i64 + 1) / n(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    LpApprox,
    LpEndpointP2,
    BarronApprox,
    SobolevApproxHigh,
    SobolevApproxLow,
    GenUpperBarron,
    GenUpperSobolev,
    MinimaxLowerSobolev,
    MinimaxLowerBarron,
    LocalComplexityN,
    FunkHeckeDecay,
    FilteredRate,
    Zeta,
    GammaStar,
    PStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentQuery {
    pub kind: ExponentKind,
    pub d: usize,
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl ExponentQuery {
    pub fn new(kind: ExponentKind, d: usize, s: u32) -> Self {
        ExponentQuery { kind, d, s, p: None, alpha: None }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }
}

/// `m(n) = c_m n^{m_exp}`, `λ(n) = c_λ n^{-lambda_exp} log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub m_exp: f64,
    pub lambda_exp: f64,
}

impl Schedule {
    pub fn width(&self, n: usize, c_m: f64) -> usize {
        ((c_m * (n as f64).powf(self.m_exp)).ceil() as usize).max(1)
    }

    pub fn lambda(&self, n: usize, c_lambda: f64) -> f64 {
        let nf = n as f64;
        c_lambda * nf.powf(-self.lambda_exp) * nf.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub value: f64,
    /// Exact value as `"num/den"` when every input is a small-denominator rational.
    pub exact: Option<String>,
    /// The bound carries an extra `log n` factor.
    pub log_factor: bool,
    pub schedule: Option<Schedule>,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Rational with denominator at most 10⁴ equal to `x` within 1e-12.
pub fn to_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    (1..=10_000i64).find_map(|den| {
        let num = (x * den as f64).round();
        ((num / den as f64 - x).abs() < 1e-12 && num.abs() < 1e12)
            .then(|| Ratio::new(num as i64, den))
    })
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn range_err(kind: ExponentKind, what: &str) -> Error {
    Error::Range(format!("{kind:?}: {what}"))
}

fn need(kind: ExponentKind, v: Option<f64>, name: &str) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(range_err(kind, &format!("parameter `{name}` is required"))),
    }
}

fn is_positive_int(x: f64) -> bool {
    x >= 1.0 && x.fract() == 0.0
}

/// Evaluate `f` exactly when possible, otherwise in `f64`.
fn eval2(
    inputs: &[f64],
    exact: impl Fn(&[Rational]) -> Rational,
    float: impl Fn(&[f64]) -> f64,
) -> (f64, Option<String>) {
    let rs: Option<Vec<Rational>> = inputs.iter().map(|&x| to_rational(x)).collect();
    match rs {
        Some(rs) => {
            let r = exact(&rs);
            (rational_to_f64(&r), Some(format!("{}/{}", r.numer(), r.denom())))
        }
        None => (float(inputs), None),
    }
}

/// Look up the exponent for `q`, validating the parameter range of its kind.
pub fn theoretical_exponent(q: &ExponentQuery) -> Result<Exponent> {
    use ExponentKind::*;
    let (d, s, kind) = (q.d, q.s, q.kind);
    let min_d = if matches!(kind, LpApprox | LpEndpointP2 | FilteredRate | Zeta | GammaStar | PStar) {
        2
    } else {
        1
    };
    if d < min_d {
        return Err(range_err(kind, &format!("d must be >= {min_d}, got {d}")));
    }
    let p_in_lp = |p: f64| -> Result<()> {
        if (1.0..2.0).contains(&p) {
            Ok(())
        } else {
            Err(range_err(kind, &format!("p must lie in [1, 2), got {p}")))
        }
    };
    let mut log_factor = false;
    let mut schedule = None;
    let (value, exact) = match kind {
        LpApprox | FilteredRate | Zeta | GammaStar => {
            let p = need(kind, q.p, "p")?;
            p_in_lp(p)?;
            match kind {
                LpApprox => eval2(&[p], |r| lp_approx(d, s, r[0]), |x| lp_approx(d, s, x[0])),
                FilteredRate => eval2(&[p], |r| filtered_rate(d, s, r[0]), |x| filtered_rate(d, s, x[0])),
                Zeta => eval2(&[p], |r| zeta(d, r[0]), |x| zeta(d, x[0])),
                _ => eval2(&[p], |r| gamma_star(d, s, r[0]), |x| gamma_star(d, s, x[0])),
            }
        }
        PStar => eval2(&[], |_| p_star(d), |_| p_star(d)),
        LpEndpointP2 => eval2(&[], |_| lp_endpoint(d, s), |_| lp_endpoint(d, s)),
        BarronApprox => eval2(&[], |_| barron_approx(d, s), |_| barron_approx(d, s)),
        SobolevApproxHigh | SobolevApproxLow => {
            if s < 1 {
                return Err(range_err(kind, "s must be >= 1"));
            }
            let a = need(kind, q.alpha, "alpha")?;
            let sd = (s as usize + d) as f64;
            let (di, si) = (d as i64, s as i64);
            if kind == SobolevApproxHigh {
                if a < sd {
                    return Err(range_err(kind, &format!("alpha must be >= s+d = {sd}, got {a}")));
                }
                eval2(
                    &[],
                    |_| Ratio::new(di + 2 * si, 2 * (di + 1)),
                    |_| (d as f64 + 2.0 * s as f64) / (2.0 * (d as f64 + 1.0)),
                )
            } else {
                if !(is_positive_int(a) && a < sd) {
                    return Err(range_err(
                        kind,
                        &format!("alpha must be an integer in [1, s+d) = [1, {sd}), got {a}"),
                    ));
                }
                eval2(
                    &[a],
                    |r| r[0] * Ratio::new(di + 2 * si, 2 * (si + di) * (di + 1)),
                    |x| x[0] * (d as f64 + 2.0 * s as f64) / (2.0 * sd * (d as f64 + 1.0)),
                )
            }
        }
        GenUpperBarron => {
            log_factor = true;
            let (di, si) = (d as f64, s as f64);
            schedule = Some(Schedule {
                m_exp: di / (2.0 * di + 2.0 * si + 1.0),
                lambda_exp: gen_barron::<f64>(d, s),
            });
            eval2(&[], |_| gen_barron(d, s), |_| gen_barron(d, s))
        }
        GenUpperSobolev => {
            log_factor = true;
            let a = need(kind, q.alpha, "alpha")?;
            let bound = s as f64 + (d as f64 + 1.0) / 2.0;
            if !(is_positive_int(a) && a < bound) {
                return Err(range_err(
                    kind,
                    &format!("alpha must be an integer in [1, s+(d+1)/2) = [1, {bound}), got {a}"),
                ));
            }
            let df = d as f64;
            schedule = Some(Schedule {
                m_exp: df / (2.0 * a + df),
                lambda_exp: 0.5 + (2.0 * s as f64 + 1.0) / (4.0 * a + 2.0 * df),
            });
            eval2(&[a], |r| gen_sobolev(d, r[0]), |x| gen_sobolev(d, x[0]))
        }
        MinimaxLowerSobolev => {
            let a = need(kind, q.alpha, "alpha")?;
            if a <= 0.0 {
                return Err(range_err(kind, &format!("alpha must be positive, got {a}")));
            }
            eval2(&[a], |r| gen_sobolev(d, r[0]), |x| gen_sobolev(d, x[0]))
        }
        MinimaxLowerBarron => eval2(&[], |_| gen_barron(d, s), |_| gen_barron(d, s)),
        LocalComplexityN => eval2(&[], |_| Ratio::new(1, 2), |_| 0.5),
        FunkHeckeDecay => eval2(&[], |_| funk_hecke_decay(d, s), |_| funk_hecke_decay(d, s)),
    };
    Ok(Exponent { value, exact, log_factor, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Ratio::new(a, b)
    }

    #[test]
    fn spot_values() {
        assert_eq!(lp_approx(2, 1, r(1, 1)), r(3, 4));
        assert_eq!(p_star::<Rational>(2), r(6, 5));
        assert_eq!(gen_barron::<Rational>(2, 1), r(5, 7));
        assert_eq!(filtered_rate(2, 1, r(1, 1)), r(3, 2));
        let e = theoretical_exponent(&ExponentQuery::new(ExponentKind::LpApprox, 2, 1).with_p(1.0))
            .unwrap();
        assert_eq!(e.exact.as_deref(), Some("3/4"));
        assert_eq!(e.value, 0.75);
        let e = theoretical_exponent(&ExponentQuery::new(ExponentKind::GenUpperBarron, 2, 1)).unwrap();
        assert_eq!(e.exact.as_deref(), Some("5/7"));
        assert!(e.log_factor);
        let sch = e.schedule.unwrap();
        assert!((sch.m_exp - 2.0 / 7.0).abs() < 1e-15);
        assert!((sch.lambda_exp - 5.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn branches_meet_at_p_star() {
        for d in 2..=10usize {
            let ps: Rational = p_star(d);
            for s in 0..=3u32 {
                let (di, si) = (d as i64, s as i64);
                let first = (ps * Ratio::from_integer(2 * si + 2 * di + 1) - Ratio::from_integer(2 * di))
                    / (Ratio::from_integer(2 * di) * ps);
                let second = (ps * Ratio::from_integer(4 * si + 3 * di - 1)
                    - Ratio::from_integer(2 * di - 2))
                    / (Ratio::from_integer(4 * di) * ps);
                assert_eq!(first, second, "d={d} s={s}");
                if d == 2 && s == 1 {
                    assert_eq!(first, r(11, 12));
                }
            }
        }
    }

    #[test]
    fn filtered_rate_is_gamma_star_over_zeta_plus_half() {
        for d in 2..=10usize {
            for s in 0..=3u32 {
                for k in 0..100i64 {
                    let p = r(100 + k, 100);
                    let want = gamma_star(d, s, p) / (zeta(d, p) + r(1, 2));
                    assert_eq!(filtered_rate(d, s, p), want, "d={d} s={s} p={p}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_p_and_left_limit() {
        for d in 2..=10usize {
            for s in 0..=3u32 {
                let mut last = lp_approx(d, s, r(1, 1));
                for k in 1..1000i64 {
                    let v = lp_approx(d, s, r(1000 + k, 1000));
                    assert!(v >= last, "d={d} s={s} k={k}");
                    last = v;
                }
                // the second branch is a rational function of p, continuous at 2
                let (di, si) = (d as i64, s as i64);
                let two = r(2, 1);
                let at_two = (two * Ratio::from_integer(4 * si + 3 * di - 1) - Ratio::from_integer(2 * di - 2))
                    / (Ratio::from_integer(4 * di) * two);
                assert_eq!(at_two, lp_left_limit(d, s));
                assert!(lp_left_limit::<Rational>(d, s) < lp_endpoint(d, s));
            }
        }
    }

    #[test]
    fn range_errors() {
        let q = ExponentQuery::new(ExponentKind::LpApprox, 2, 1).with_p(2.0);
        match theoretical_exponent(&q) {
            Err(Error::Range(msg)) => assert!(msg.contains("[1, 2)")),
            other => panic!("{other:?}"),
        }
        assert!(theoretical_exponent(&ExponentQuery::new(ExponentKind::LpApprox, 2, 1)).is_err());
        assert!(theoretical_exponent(&ExponentQuery::new(ExponentKind::LpApprox, 1, 1).with_p(1.0)).is_err());
        let q = ExponentQuery::new(ExponentKind::SobolevApproxLow, 2, 1).with_alpha(3.0);
        assert!(theoretical_exponent(&q).is_err());
        let q = ExponentQuery::new(ExponentKind::SobolevApproxLow, 2, 1).with_alpha(2.0);
        assert_eq!(theoretical_exponent(&q).unwrap().exact.as_deref(), Some("4/9"));
        let q = ExponentQuery::new(ExponentKind::GenUpperSobolev, 2, 1).with_alpha(2.0);
        let e = theoretical_exponent(&q).unwrap();
        assert_eq!(e.exact.as_deref(), Some("2/3"));
        assert!(theoretical_exponent(&ExponentQuery::new(ExponentKind::GenUpperSobolev, 2, 1).with_alpha(3.0)).is_err());
    }

    #[test]
    fn float_and_exact_paths_agree() {
        let p = std::f64::consts::SQRT_2 - 0.2;
        let q = ExponentQuery::new(ExponentKind::LpApprox, 3, 2).with_p(p);
        let e = theoretical_exponent(&q).unwrap();
        assert!(e.exact.is_none());
        assert!((e.value - lp_approx(3, 2, p)).abs() < 1e-15);
        assert_eq!(to_rational(1.1), Some(r(11, 10)));
        let q = ExponentQuery::new(ExponentKind::FilteredRate, 2, 1).with_p(1.5);
        let e = theoretical_exponent(&q).unwrap();
        assert!((e.value - filtered_rate(2, 1, 1.5)).abs() < 1e-15);
        assert_eq!(e.exact.as_deref(), Some("23/7"));
    }
}
