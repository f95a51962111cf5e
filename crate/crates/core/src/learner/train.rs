//! Path-norm regularized least squares by proximal gradient in the
//! normalized parameterization: every inner vector `θ_j = (w_j, b_j)` stays on
//! the ℓ1 unit sphere, so the penalty is `(λ/m) Σ |a_j|`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::net::{activate, Neuron, ReluOrder, ShallowNet, TruncationLevel};
use crate::rng::{l1_sphere, task_rng};

use super::data::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Width `m`.
    pub m: usize,
    pub lambda: f64,
    pub steps: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Truncation level `B`; `None` means `2 · max |y_i|`.
    pub truncation: Option<f64>,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Stop a restart after `patience` consecutive accepted steps whose
    /// relative decrease is below `rel_tol`.
    pub rel_tol: f64,
    pub patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            m: 50,
            lambda: 0.0,
            steps: 5000,
            restarts: 8,
            seed: 0,
            truncation: None,
            initial_step: 0.1,
            max_step: 100.0,
            min_step: 1e-10,
            rel_tol: 1e-12,
            patience: 50,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.m == 0 {
            return bad("width m must be >= 1".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.steps == 0 || self.restarts == 0 {
            return bad("steps and restarts must be >= 1".into());
        }
        if let Some(b) = self.truncation {
            TruncationLevel::new(b)?;
        }
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step && self.initial_step <= self.max_step) {
            return bad("step sizes must satisfy 0 < min_step <= initial_step <= max_step".into());
        }
        Ok(())
    }
}

/// Hex SHA-256 of the canonical JSON of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathNormSummary {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub net: ShallowNet,
    pub empirical_risk: f64,
    pub objective: f64,
    pub path_norm: f64,
    pub path_norm_trajectory: PathNormSummary,
    /// Index of the winning restart; ties go to the lowest index.
    pub restart: usize,
    pub restart_objectives: Vec<f64>,
    /// Objective of the winning restart at its start and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub steps_taken: usize,
    pub truncation: f64,
    pub lambda: f64,
    pub seed: u64,
    pub config_hash: String,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Flat parameters: `theta` is `m × (d+1)`, row `j` is `(w_j, b_j)`.
#[derive(Debug, Clone)]
struct Params {
    a: Vec<f64>,
    theta: Vec<f64>,
}

struct Problem<'a> {
    s: ReluOrder,
    d1: usize,
    m: usize,
    /// Inputs with a trailing 1.
    xs: Vec<f64>,
    ys: &'a [f64],
    lambda: f64,
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.ys.len()
    }

    fn predict(&self, p: &Params, i: usize) -> f64 {
        let x = &self.xs[i * self.d1..(i + 1) * self.d1];
        let mut acc = 0.0;
        for j in 0..self.m {
            let th = &p.theta[j * self.d1..(j + 1) * self.d1];
            let z: f64 = th.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += p.a[j] * activate(self.s, z);
        }
        acc / self.m as f64
    }

    fn risk(&self, p: &Params) -> f64 {
        (0..self.n()).map(|i| (self.predict(p, i) - self.ys[i]).powi(2)).sum::<f64>() / self.n() as f64
    }

    fn penalty(&self, p: &Params) -> f64 {
        self.lambda * p.a.iter().map(|v| v.abs()).sum::<f64>() / self.m as f64
    }

    fn objective(&self, p: &Params) -> f64 {
        self.risk(p) + self.penalty(p)
    }

    /// Gradient of `m · risk` with respect to `a` and `θ`.
    fn scaled_grad(&self, p: &Params) -> (Vec<f64>, Vec<f64>) {
        let (m, d1, s) = (self.m, self.d1, self.s.get());
        let mut ga = vec![0.0; m];
        let mut gt = vec![0.0; m * d1];
        let mut z = vec![0.0; m];
        let c = 2.0 / self.n() as f64;
        for i in 0..self.n() {
            let x = &self.xs[i * d1..(i + 1) * d1];
            let mut f = 0.0;
            for j in 0..m {
                let th = &p.theta[j * d1..(j + 1) * d1];
                z[j] = th.iter().zip(x).map(|(a, b)| a * b).sum();
                f += p.a[j] * activate(self.s, z[j]);
            }
            let r = c * (f / m as f64 - self.ys[i]);
            for j in 0..m {
                ga[j] += r * activate(self.s, z[j]);
                let dz = r * p.a[j] * s as f64 * activate(ReluOrder(s - 1), z[j]);
                if dz != 0.0 {
                    for (g, xk) in gt[j * d1..(j + 1) * d1].iter_mut().zip(x) {
                        *g += dz * xk;
                    }
                }
            }
        }
        (ga, gt)
    }

    /// Gradient step of size `eta`, renormalization of each `θ_j` with the
    /// scale `c^s` moved into `a_j`, then soft-thresholding at `eta·λ`.
    fn prox_step(&self, p: &Params, ga: &[f64], gt: &[f64], eta: f64) -> Params {
        let (d1, s) = (self.d1, self.s.as_i32());
        let mut a = Vec::with_capacity(self.m);
        let mut theta = p.theta.clone();
        for j in 0..self.m {
            let row = &mut theta[j * d1..(j + 1) * d1];
            for (t, g) in row.iter_mut().zip(&gt[j * d1..(j + 1) * d1]) {
                *t -= eta * g;
            }
            let mut aj = p.a[j] - eta * ga[j];
            let c: f64 = row.iter().map(|v| v.abs()).sum();
            if c > 0.0 && c.is_finite() {
                row.iter_mut().for_each(|v| *v /= c);
                aj *= c.powi(s);
            } else {
                row.copy_from_slice(&p.theta[j * d1..(j + 1) * d1]);
            }
            let t = eta * self.lambda;
            a.push(aj.signum() * (aj.abs() - t).max(0.0));
        }
        Params { a, theta }
    }
}

struct RestartOutcome {
    params: Params,
    objective: f64,
    norms: PathNormSummary,
    trace: Vec<f64>,
    steps: usize,
}

fn run_restart(problem: &Problem, init: Params, cfg: &TrainConfig, restart: usize) -> Result<RestartOutcome> {
    let mut p = init;
    let mut obj = problem.objective(&p);
    if !obj.is_finite() {
        return Err(Error::NonFinite { restart, step: 0 });
    }
    let pn = |p: &Params| p.a.iter().map(|v| v.abs()).sum::<f64>() / problem.m as f64;
    let initial = pn(&p);
    let mut norms = PathNormSummary { initial, min: initial, max: initial, last: initial };
    let mut eta = cfg.initial_step;
    let mut quiet = 0;
    let mut steps = 0;
    let mut trace = vec![obj];
    'outer: for step in 1..=cfg.steps {
        let (ga, gt) = problem.scaled_grad(&p);
        if ga.iter().chain(&gt).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { restart, step });
        }
        loop {
            let cand = problem.prox_step(&p, &ga, &gt, eta);
            let cobj = problem.objective(&cand);
            if cobj.is_finite() && cobj <= obj {
                let rel = (obj - cobj) / obj.abs().max(f64::MIN_POSITIVE);
                p = cand;
                obj = cobj;
                trace.push(obj);
                steps = step;
                let v = pn(&p);
                norms.min = norms.min.min(v);
                norms.max = norms.max.max(v);
                norms.last = v;
                eta = (eta * 2.0).min(cfg.max_step);
                quiet = if rel < cfg.rel_tol { quiet + 1 } else { 0 };
                if quiet >= cfg.patience {
                    break 'outer;
                }
                break;
            }
            eta *= 0.5;
            if eta < cfg.min_step {
                break 'outer;
            }
        }
    }
    Ok(RestartOutcome { params: p, objective: obj, norms, trace, steps })
}

fn random_init<R: Rng>(rng: &mut R, m: usize, d1: usize) -> Params {
    let normal = Normal::new(0.0, (1.0 / m as f64).sqrt()).expect("valid std");
    let a = (0..m).map(|_| normal.sample(rng)).collect();
    let theta = (0..m).flat_map(|_| l1_sphere(rng, d1)).collect();
    Params { a, theta }
}

/// Comparator `g` of width `m_g ≤ m` as a width-`m` point: normalized
/// neurons first with `a` scaled by `m/m_g`, padding neurons with `a = 0`.
fn comparator_init<R: Rng>(rng: &mut R, g: &ShallowNet, m: usize) -> Result<Params> {
    let mg = g.width();
    if mg > m {
        return Err(Error::InvalidParameter(format!("comparator width {mg} exceeds training width {m}")));
    }
    let d1 = g.dim() + 1;
    let mut p = random_init(rng, m, d1);
    let gn = g.normalize()?;
    for (j, n) in gn.neurons().iter().enumerate() {
        let row = &mut p.theta[j * d1..(j + 1) * d1];
        if n.l1_scale() == 0.0 {
            p.a[j] = 0.0;
            continue;
        }
        row[..d1 - 1].copy_from_slice(&n.w);
        row[d1 - 1] = n.b;
        p.a[j] = n.a * m as f64 / mg as f64;
    }
    for j in mg..m {
        p.a[j] = 0.0;
    }
    Ok(p)
}

/// `π_B f` for the best of `cfg.restarts` runs. When `comparator` is given,
/// restart 0 starts from it, so the returned objective is at most the
/// comparator's.
pub fn train_erm(data: &Dataset, s: ReluOrder, cfg: &TrainConfig, comparator: Option<&ShallowNet>) -> Result<FitResult> {
    if s.get() == 0 {
        return Err(Error::ZeroOrder { what: "training" });
    }
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidParameter("dataset is empty".into()));
    }
    if let Some(g) = comparator {
        if g.dim() != data.d {
            return Err(Error::DimensionMismatch { expected: data.d, got: g.dim() });
        }
        if g.order() != s {
            return Err(Error::InvalidParameter("comparator activation order differs".into()));
        }
    }
    let d1 = data.d + 1;
    let xs: Vec<f64> = data.xs.iter().flat_map(|x| x.iter().copied().chain(std::iter::once(1.0))).collect();
    let problem = Problem { s, d1, m: cfg.m, xs, ys: &data.ys, lambda: cfg.lambda };

    let outcomes: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = task_rng(cfg.seed, r as u64);
            let init = match (r, comparator) {
                (0, Some(g)) => comparator_init(&mut rng, g, cfg.m)?,
                _ => random_init(&mut rng, cfg.m, d1),
            };
            run_restart(&problem, init, cfg, r)
        })
        .collect();
    let outcomes: Vec<RestartOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let restart_objectives: Vec<f64> = outcomes.iter().map(|o| o.objective).collect();
    let best = (0..outcomes.len())
        .min_by(|&i, &j| restart_objectives[i].total_cmp(&restart_objectives[j]).then(i.cmp(&j)))
        .expect("at least one restart");
    let out = &outcomes[best];

    let zero_obj = data.ys.iter().map(|y| y * y).sum::<f64>() / data.len() as f64;
    let (net, objective) = if out.objective <= zero_obj {
        (params_to_net(s, data.d, &out.params)?, out.objective)
    } else {
        // every restart ended above the zero network; it is itself feasible
        log::warn!("all restarts ended above the zero-network objective");
        let zero = Params { a: vec![0.0; cfg.m], theta: out.params.theta.clone() };
        (params_to_net(s, data.d, &zero)?, zero_obj)
    };
    let max_abs_y = data.ys.iter().fold(0.0f64, |acc, y| acc.max(y.abs()));
    let truncation = cfg.truncation.unwrap_or(if max_abs_y > 0.0 { 2.0 * max_abs_y } else { 1.0 });
    let empirical_risk = problem.risk(&net_to_params(&net));
    Ok(FitResult {
        path_norm: net.path_norm(),
        net,
        empirical_risk,
        objective,
        path_norm_trajectory: out.norms.clone(),
        restart: best,
        restart_objectives,
        objective_trace: out.trace.clone(),
        steps_taken: out.steps,
        truncation,
        lambda: cfg.lambda,
        seed: cfg.seed,
        config_hash: config_hash(cfg),
    })
}

fn params_to_net(s: ReluOrder, d: usize, p: &Params) -> Result<ShallowNet> {
    let d1 = d + 1;
    let neurons = p
        .a
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let row = &p.theta[j * d1..(j + 1) * d1];
            Neuron::new(a, row[..d].to_vec(), row[d])
        })
        .collect();
    ShallowNet::new(s, d, neurons)
}

fn net_to_params(net: &ShallowNet) -> Params {
    let a = net.neurons().iter().map(|n| n.a).collect();
    let theta = net.neurons().iter().flat_map(|n| n.w.iter().copied().chain(std::iter::once(n.b))).collect();
    Params { a, theta }
}

/// `(1/n) Σ (g(x_i) - y_i)² + λ · path_norm(g)`.
pub fn regularized_objective(net: &ShallowNet, data: &Dataset, lambda: f64) -> Result<f64> {
    let mut risk = 0.0;
    for (x, y) in data.xs.iter().zip(&data.ys) {
        risk += (net.eval(x)? - y).powi(2);
    }
    Ok(risk / data.len() as f64 + lambda * net.path_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{sample_dataset, NoiseModel};
    use crate::targets::make_barron_target;

    fn small_cfg() -> TrainConfig {
        TrainConfig { m: 20, steps: 300, restarts: 3, seed: 5, ..TrainConfig::default() }
    }

    #[test]
    fn zero_order_and_validation() {
        let data = sample_dataset(|x| x[0], "lin", 2, 20, NoiseModel::none(), 1).unwrap();
        assert_eq!(train_erm(&data, ReluOrder(0), &small_cfg(), None), Err(Error::ZeroOrder { what: "training" }));
        let bad = TrainConfig { m: 0, ..small_cfg() };
        assert!(train_erm(&data, ReluOrder(1), &bad, None).is_err());
        let bad = TrainConfig { lambda: -1.0, ..small_cfg() };
        assert!(train_erm(&data, ReluOrder(1), &bad, None).is_err());
    }

    #[test]
    fn huge_lambda_kills_everything() {
        let data = sample_dataset(|x| 1.0 + x[0], "lin", 2, 50, NoiseModel::none(), 2).unwrap();
        let cfg = TrainConfig { lambda: 1e6, ..small_cfg() };
        let fit = train_erm(&data, ReluOrder(1), &cfg, None).unwrap();
        assert!(fit.net.neurons().iter().all(|n| n.a == 0.0));
        let mean_y2 = data.ys.iter().map(|y| y * y).sum::<f64>() / 50.0;
        assert!((fit.objective - mean_y2).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = sample_dataset(|x| x[0] * x[1], "prod", 2, 30, NoiseModel::none(), 3).unwrap();
        for s in 1..4 {
            let xs: Vec<f64> = data.xs.iter().flat_map(|x| x.iter().copied().chain([1.0])).collect();
            let pr = Problem { s: ReluOrder(s), d1: 3, m: 4, xs, ys: &data.ys, lambda: 0.0 };
            let p = random_init(&mut task_rng(1, 0), 4, 3);
            let (ga, gt) = pr.scaled_grad(&p);
            let h = 1e-6;
            for j in 0..4 {
                let mut q = p.clone();
                q.a[j] += h;
                let mut r = p.clone();
                r.a[j] -= h;
                let fd = 4.0 * (pr.risk(&q) - pr.risk(&r)) / (2.0 * h);
                assert!((fd - ga[j]).abs() < 1e-6);
                for k in 0..3 {
                    let mut q = p.clone();
                    q.theta[j * 3 + k] += h;
                    let mut r = p.clone();
                    r.theta[j * 3 + k] -= h;
                    let fd = 4.0 * (pr.risk(&q) - pr.risk(&r)) / (2.0 * h);
                    assert!((fd - gt[j * 3 + k]).abs() < 1e-5, "s={s} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn prox_step_preserves_function_without_penalty() {
        let data = sample_dataset(|x| x[0], "lin", 2, 10, NoiseModel::none(), 3).unwrap();
        let xs: Vec<f64> = data.xs.iter().flat_map(|x| x.iter().copied().chain([1.0])).collect();
        let pr = Problem { s: ReluOrder(2), d1: 3, m: 5, xs, ys: &data.ys, lambda: 0.0 };
        let p = random_init(&mut task_rng(8, 0), 5, 3);
        let (ga, gt) = pr.scaled_grad(&p);
        let q = pr.prox_step(&p, &ga, &gt, 0.01);
        for j in 0..5 {
            let norm: f64 = q.theta[j * 3..j * 3 + 3].iter().map(|v| v.abs()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // unnormalized step evaluated directly agrees with the renormalized one
        let mut raw = p.clone();
        for (t, g) in raw.theta.iter_mut().zip(&gt) {
            *t -= 0.01 * g;
        }
        for (a, g) in raw.a.iter_mut().zip(&ga) {
            *a -= 0.01 * g;
        }
        for i in 0..10 {
            assert!((pr.predict(&raw, i) - pr.predict(&q, i)).abs() < 1e-12);
        }
    }

    #[test]
    fn objective_bounds_and_determinism() {
        let target = make_barron_target(2, ReluOrder(1), 4, 9).unwrap();
        let data = sample_dataset(|x| target.eval(x).unwrap(), "barron", 2, 100, NoiseModel::none(), 4).unwrap();
        let cfg = TrainConfig { lambda: 1e-3, ..small_cfg() };
        let fit = train_erm(&data, ReluOrder(1), &cfg, Some(&target.net)).unwrap();
        let zero = data.ys.iter().map(|y| y * y).sum::<f64>() / 100.0;
        assert!(fit.objective <= zero);
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let g_obj = regularized_objective(&target.net, &data, cfg.lambda).unwrap();
        assert!(fit.objective <= g_obj + 1e-12, "{} vs {g_obj}", fit.objective);
        assert!((regularized_objective(&fit.net, &data, cfg.lambda).unwrap() - fit.objective).abs() < 1e-10);
        let again = train_erm(&data, ReluOrder(1), &cfg, Some(&target.net)).unwrap();
        assert_eq!(fit, again);
        let back = FitResult::from_json(&fit.to_json()).unwrap();
        assert_eq!(back, fit);
    }
}
