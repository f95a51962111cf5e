//! Least-squares slope in log–log coordinates with a residual-bootstrap
//! confidence interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::task_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Bootstrap 95% interval for the slope; always contains `slope`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_points: usize,
    /// Input indices dropped because `y == 0`.
    pub excluded: Vec<usize>,
}

impl RateFit {
    pub fn ci_excludes_zero(&self) -> bool {
        self.ci_high < 0.0 || self.ci_low > 0.0
    }
}

/// OLS slope, intercept and the slope's standard error.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    (slope, intercept, se)
}

/// Fit `log y = intercept + slope·log x`. Points with `y == 0` are excluded
/// and listed; negative or non-finite values are rejected. The interval is a
/// bootstrap-t interval from `bootstrap_reps` residual resamples.
pub fn fit_loglog(xs: &[f64], ys: &[f64], bootstrap_reps: usize, seed: u64) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(xs.len());
    let mut excluded = Vec::new();
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0 && x.is_finite()) || !(y >= 0.0 && y.is_finite()) {
            return Err(Error::Domain(format!("point {k} = ({x}, {y}) is not in (0,∞)×[0,∞)")));
        }
        if y == 0.0 {
            excluded.push(k);
            continue;
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    let usable = lx.len();
    let distinct_x = lx.iter().any(|&v| v != lx[0]);
    if usable < 3 || !distinct_x {
        return Err(Error::TooFewPoints { usable });
    }

    let (slope, intercept, se) = ols(&lx, &ly);
    let fitted: Vec<f64> = lx.iter().map(|x| intercept + slope * x).collect();
    let resid: Vec<f64> = ly.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let my = ly.iter().sum::<f64>() / usable as f64;
    let ss_res: f64 = resid.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    let (mut ci_low, mut ci_high) = (slope, slope);
    if se > 0.0 && bootstrap_reps > 0 {
        let mut rng = task_rng(seed, 0);
        let mut ts = Vec::with_capacity(bootstrap_reps);
        let mut yb = vec![0.0; usable];
        for _ in 0..bootstrap_reps {
            for (k, y) in yb.iter_mut().enumerate() {
                *y = fitted[k] + resid[rng.random_range(0..usable)];
            }
            let (b, _, se_b) = ols(&lx, &yb);
            if se_b > 0.0 {
                ts.push((b - slope) / se_b);
            }
        }
        if !ts.is_empty() {
            ts.sort_by(f64::total_cmp);
            let q = |p: f64| ts[((p * (ts.len() - 1) as f64).round() as usize).min(ts.len() - 1)];
            ci_low = (slope - q(0.975) * se).min(slope);
            ci_high = (slope - q(0.025) * se).max(slope);
        }
    }
    Ok(RateFit { slope, intercept, r_squared, ci_low, ci_high, n_points: usable, excluded })
}
