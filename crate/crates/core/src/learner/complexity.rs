//! Monte Carlo lower estimate of the local complexity
//! `E_ξ sup { |(1/n) Σ ξ_i f(x_i)| : path_norm(f) ≤ M, ‖f‖_n ≤ δ }`.
//!
//! The supremum is searched over width-`k` networks on the boundary
//! `path_norm = M`: scaling `f` by `t ≤ 1` never helps once `‖f‖_n ≤ δ`, and
//! beyond that the best feasible multiple of `f` attains
//! `|⟨ξ,f⟩_n| · min(1, δ/‖f‖_n)`. The search returns a value attained by a
//! feasible network, so it never exceeds the true supremum.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{activate, ReluOrder};
use crate::rng::{l1_sphere, task_rng};

use super::data::{uniform_ball_point, NoiseModel};
use super::eval::McEstimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    pub d: usize,
    pub s: ReluOrder,
    /// Path-norm radius `M`.
    pub path_bound: f64,
    pub n: usize,
    pub noise: NoiseModel,
    pub trials: usize,
    pub seed: u64,
    /// Random starting networks per trial.
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    /// Width of each candidate network.
    #[serde(default = "default_width")]
    pub width: usize,
    /// Starting points refined by local ascent.
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default = "default_ascent_steps")]
    pub ascent_steps: usize,
}

fn default_candidates() -> usize {
    64
}
fn default_width() -> usize {
    4
}
fn default_refine() -> usize {
    4
}
fn default_ascent_steps() -> usize {
    60
}

impl ComplexityConfig {
    pub fn new(d: usize, s: ReluOrder, path_bound: f64, n: usize, noise: NoiseModel, trials: usize, seed: u64) -> Self {
        ComplexityConfig {
            d,
            s,
            path_bound,
            n,
            noise,
            trials,
            seed,
            candidates: default_candidates(),
            width: default_width(),
            refine: default_refine(),
            ascent_steps: default_ascent_steps(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 || self.trials == 0 || self.width == 0 || self.candidates == 0 {
            return Err(Error::InvalidParameter("d, n, trials, width and candidates must be >= 1".into()));
        }
        if !(self.path_bound >= 0.0 && self.path_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("path bound must be >= 0, got {}", self.path_bound)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    a: Vec<f64>,
    theta: Vec<f64>,
}

struct Trial<'a> {
    cfg: &'a ComplexityConfig,
    /// Inputs with a trailing 1, row-major `n × (d+1)`.
    xs: Vec<f64>,
    xi: Vec<f64>,
}

/// `(1/n) Σ ξ_i f_i` and `‖f‖_n`.
struct Stats {
    g: f64,
    norm: f64,
}

impl Trial<'_> {
    fn d1(&self) -> usize {
        self.cfg.d + 1
    }

    fn outputs(&self, c: &Candidate) -> Vec<f64> {
        let (d1, k) = (self.d1(), c.a.len());
        (0..self.cfg.n)
            .map(|i| {
                let x = &self.xs[i * d1..(i + 1) * d1];
                let mut f = 0.0;
                for j in 0..k {
                    let z: f64 = c.theta[j * d1..(j + 1) * d1].iter().zip(x).map(|(a, b)| a * b).sum();
                    f += c.a[j] * activate(self.cfg.s, z);
                }
                f / k as f64
            })
            .collect()
    }

    fn stats(&self, f: &[f64]) -> Stats {
        let n = self.cfg.n as f64;
        let g = f.iter().zip(&self.xi).map(|(a, b)| a * b).sum::<f64>() / n;
        let norm = (f.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        Stats { g, norm }
    }

    fn value(st: &Stats, delta: f64) -> f64 {
        if st.norm <= delta {
            st.g.abs()
        } else {
            st.g.abs() * delta / st.norm
        }
    }

    /// Unit ℓ1 rows with the scale moved into `a`, then `a` scaled to path norm `M`.
    fn project(&self, c: &mut Candidate) {
        let (d1, k, s) = (self.d1(), c.a.len(), self.cfg.s.as_i32());
        for j in 0..k {
            let row = &mut c.theta[j * d1..(j + 1) * d1];
            let r: f64 = row.iter().map(|v| v.abs()).sum();
            if r > 0.0 {
                row.iter_mut().for_each(|v| *v /= r);
                c.a[j] *= r.powi(s);
            }
        }
        let pn = c.a.iter().map(|v| v.abs()).sum::<f64>() / k as f64;
        if pn > 0.0 {
            let scale = self.cfg.path_bound / pn;
            c.a.iter_mut().for_each(|v| *v *= scale);
        }
    }

    fn random_candidate<R: Rng>(&self, rng: &mut R) -> Candidate {
        let k = self.cfg.width;
        let mut c = Candidate {
            a: (0..k).map(|_| StandardNormal.sample(rng)).collect(),
            theta: (0..k).flat_map(|_| l1_sphere(rng, self.d1())).collect(),
        };
        self.project(&mut c);
        c
    }

    /// Gradient of the objective with respect to `a` and `θ`.
    fn gradient(&self, c: &Candidate, f: &[f64], st: &Stats, delta: f64) -> (Vec<f64>, Vec<f64>) {
        let (d1, k, n) = (self.d1(), c.a.len(), self.cfg.n as f64);
        let sg = st.g.signum();
        // V = |g| w with w = min(1, δ/N); dV = sg·w·dg - |g|·δ/N²·dN on the clipped branch,
        // and dN = (1/(nN)) Σ f_i df_i
        let (cg, cn) = if st.norm <= delta {
            (sg, 0.0)
        } else {
            (sg * delta / st.norm, -st.g.abs() * delta / (st.norm * st.norm * st.norm))
        };
        let mut ga = vec![0.0; k];
        let mut gt = vec![0.0; k * d1];
        let s = self.cfg.s.get();
        for i in 0..self.cfg.n {
            let x = &self.xs[i * d1..(i + 1) * d1];
            let weight = (cg * self.xi[i] + cn * f[i]) / (n * k as f64);
            for j in 0..k {
                let z: f64 = c.theta[j * d1..(j + 1) * d1].iter().zip(x).map(|(a, b)| a * b).sum();
                ga[j] += weight * activate(self.cfg.s, z);
                if s >= 1 {
                    let dz = weight * c.a[j] * s as f64 * activate(ReluOrder(s - 1), z);
                    if dz != 0.0 {
                        for (g, xv) in gt[j * d1..(j + 1) * d1].iter_mut().zip(x) {
                            *g += dz * xv;
                        }
                    }
                }
            }
        }
        (ga, gt)
    }

    /// Block-normalized ascent with backtracking; only improving moves are kept.
    fn ascend(&self, mut c: Candidate, delta: f64) -> (Candidate, f64) {
        let mut f = self.outputs(&c);
        let mut st = self.stats(&f);
        let mut best = Self::value(&st, delta);
        let mut eta = 0.1;
        for _ in 0..self.cfg.ascent_steps {
            let (ga, gt) = self.gradient(&c, &f, &st, delta);
            let na = ga.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nt = gt.iter().map(|v| v * v).sum::<f64>().sqrt();
            if na == 0.0 && nt == 0.0 {
                break;
            }
            let sa = if na > 0.0 { self.cfg.path_bound.max(1e-12) / na } else { 0.0 };
            let st_ = if nt > 0.0 { 1.0 / nt } else { 0.0 };
            let mut improved = false;
            while eta > 1e-4 {
                let mut trial = c.clone();
                trial.a.iter_mut().zip(&ga).for_each(|(v, g)| *v += eta * sa * g);
                trial.theta.iter_mut().zip(&gt).for_each(|(v, g)| *v += eta * st_ * g);
                self.project(&mut trial);
                let tf = self.outputs(&trial);
                let tst = self.stats(&tf);
                let tv = Self::value(&tst, delta);
                if tv > best {
                    c = trial;
                    f = tf;
                    st = tst;
                    best = tv;
                    eta = (eta * 1.5).min(1.0);
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (c, best)
    }

    /// Best values for ascending `deltas`, reusing each maximizer as a start
    /// for the next radius so the values are nondecreasing.
    fn run<R: Rng>(&self, rng: &mut R, deltas: &[f64]) -> Vec<f64> {
        let pool: Vec<Candidate> = (0..self.cfg.candidates).map(|_| self.random_candidate(rng)).collect();
        let mut carried: Option<Candidate> = None;
        let mut out = Vec::with_capacity(deltas.len());
        for &delta in deltas {
            if delta == 0.0 || self.cfg.path_bound == 0.0 {
                out.push(0.0);
                continue;
            }
            let mut scored: Vec<(f64, &Candidate)> =
                pool.iter().chain(carried.iter()).map(|c| (Self::value(&self.stats(&self.outputs(c)), delta), c)).collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut starts: Vec<Candidate> = scored.iter().take(self.cfg.refine).map(|(_, c)| (*c).clone()).collect();
            if let Some(prev) = &carried {
                starts.push(prev.clone());
            }
            let (c, v) = starts
                .into_iter()
                .map(|c| self.ascend(c, delta))
                .fold(None::<(Candidate, f64)>, |acc, (c, v)| match acc {
                    Some((ac, av)) if av >= v => Some((ac, av)),
                    _ => Some((c, v)),
                })
                .expect("at least one start");
            out.push(v);
            carried = Some(c);
        }
        out
    }
}

/// Estimates for every radius in `deltas` from shared trials; each entry is
/// the trial mean with its standard error.
pub fn local_complexity_curve(cfg: &ComplexityConfig, deltas: &[f64]) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    if deltas.is_empty() || deltas.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(Error::InvalidParameter("deltas must be nonempty and >= 0".into()));
    }
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&i, &j| deltas[i].total_cmp(&deltas[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| deltas[i]).collect();
    let per_trial: Vec<Vec<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = task_rng(cfg.seed, t as u64);
            let xs: Vec<f64> = (0..cfg.n)
                .flat_map(|_| {
                    let mut x = uniform_ball_point(&mut rng, cfg.d);
                    x.push(1.0);
                    x
                })
                .collect();
            let xi: Vec<f64> = (0..cfg.n).map(|_| cfg.noise.sample(&mut rng)).collect();
            Trial { cfg, xs, xi }.run(&mut rng, &sorted)
        })
        .collect();
    let mut out = vec![McEstimate { mean: 0.0, stderr: 0.0, samples: 0 }; deltas.len()];
    for (k, &i) in order.iter().enumerate() {
        let vals: Vec<f64> = per_trial.iter().map(|v| v[k]).collect();
        out[i] = McEstimate::from_samples(&vals);
    }
    Ok(out)
}

/// Single-radius estimate with the default search settings.
#[allow(clippy::too_many_arguments)]
pub fn local_complexity_mc(
    d: usize,
    s: ReluOrder,
    path_bound: f64,
    delta: f64,
    n: usize,
    noise: NoiseModel,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    let cfg = ComplexityConfig::new(d, s, path_bound, n, noise, trials, seed);
    Ok(local_complexity_curve(&cfg, &[delta])?[0])
}
