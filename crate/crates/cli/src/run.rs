//! Execution of one experiment and persistence of its outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::RngCore;
use serde::Serialize;

use relus_core::learner::{
    config_hash, generalization_error, local_complexity_curve, sample_dataset, train_erm,
    ComplexityConfig, McEstimate,
};
use relus_core::net::{ReluOrder, ShallowNet, TruncationLevel};
use relus_core::rates::{
    fit_loglog, sweep_filtered_approx, sweep_m_approx, sweep_mollifier, sweep_n_generalization,
    theoretical_exponent, ExponentKind, ExponentQuery, FilteredSweepConfig, MollifierSweepConfig,
    RateFit, SampleSweepConfig, SweepReport, WidthSweepConfig, BOOTSTRAP_REPS,
};
use relus_core::rng::task_rng;
use relus_core::sphere::{closed_form_lambda, funk_hecke_coeff, harmonic_dim, SphereDim};
use relus_core::targets::{make_barron_target, make_lp_target, SobolevTarget};
use relus_core::Error;

use crate::config::{BallTarget, Experiment, ExperimentConfig};
use crate::svg::{render, Chart};

pub const TOOL: &str = "relus-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// Numerical or I/O failure during the run; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Range(_) | Error::DimensionMismatch { .. } | Error::ZeroOrder { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Self-describing wrapper written as `report.json`.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config_hash: &'a str,
    config: &'a Experiment,
    report: T,
}

struct Output<'a> {
    dir: &'a Path,
    cfg: &'a ExperimentConfig,
    hash: String,
}

impl Output<'_> {
    fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    fn report<T: Serialize>(&self, report: T) -> Result<(), CliError> {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            command: self.cfg.experiment.command(),
            seed: self.cfg.seed,
            config_hash: &self.hash,
            config: &self.cfg.experiment,
            report,
        };
        self.write("report.json", &(serde_json::to_string_pretty(&env).expect("report serializes") + "\n"))
    }

    fn plot(&self, chart: Chart) -> Result<(), CliError> {
        if self.cfg.plot {
            self.write("plot.svg", &render(&chart))?;
        }
        Ok(())
    }

    fn sweep(&self, rep: &SweepReport, x_label: &str, y_label: &str) -> Result<(), CliError> {
        self.report(rep)?;
        self.write("points.csv", &rep.points_csv())?;
        let pts = rep.fit_points();
        self.plot(Chart {
            title: &format!("{} ({})", rep.sweep, self.cfg.experiment.command()),
            x_label,
            y_label,
            points: &pts,
            reference_slope: rep.reference_slope,
            fit: rep.fit.as_ref().map(|f| (f.slope, f.intercept)),
        })
    }
}

type BallFn = Box<dyn Fn(&[f64]) -> f64 + Sync>;

fn ball_target(t: &BallTarget, d: usize, s: ReluOrder, seed: u64) -> Result<(BallFn, Option<ShallowNet>), CliError> {
    Ok(match t {
        BallTarget::Barron { atoms, target_seed } => {
            let b = make_barron_target(d, s, *atoms, target_seed.unwrap_or(seed))?;
            let net = b.net.clone();
            (Box::new(move |x: &[f64]| b.eval(x).unwrap_or(f64::NAN)), Some(net))
        }
        BallTarget::Sobolev { function } => {
            let f = SobolevTarget::new(d, function.clone())?;
            (Box::new(move |x: &[f64]| f.value(x)), None)
        }
        BallTarget::Lp { p, profile, maxdeg } => {
            let t = make_lp_target(SphereDim::new(d)?, s, *p, profile, *maxdeg)?;
            (Box::new(move |x: &[f64]| t.eval_ball(x).unwrap_or(f64::NAN)), None)
        }
    })
}

fn target_id(t: &BallTarget) -> String {
    serde_json::to_string(t).expect("target serializes")
}

pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let out = Output { dir, cfg, hash: config_hash(&(cfg.seed, &cfg.experiment)) };
    out.write("config.json", &(cfg.to_json() + "\n"))?;
    let seed = cfg.seed;
    let mut summary = Vec::new();
    match &cfg.experiment {
        Experiment::Spectrum { d, s, maxdeg } => {
            let (d, s) = (SphereDim::new(*d)?, ReluOrder(*s));
            let spec = funk_hecke_coeff(d, s, *maxdeg)?;
            let mut csv = String::from("i,N(d,i),lambda_i,closed_form_lambda_i,ratio\n");
            for (i, &l) in spec.lambdas().iter().enumerate() {
                let cf = closed_form_lambda(d, s, i);
                let ratio = match cf {
                    Some(c) if l != 0.0 => c / l,
                    _ => f64::NAN,
                };
                let cf = cf.unwrap_or(f64::NAN);
                let _ = writeln!(csv, "{i},{},{l:e},{cf:e},{ratio:e}", harmonic_dim(d, i));
            }
            out.write("spectrum.csv", &csv)?;
            let zeros = spec.lambdas().iter().filter(|&&l| l == 0.0).count();
            out.report(serde_json::json!({
                "lambda_0": spec.lambdas()[0],
                "parity_zeros": zeros,
                "max_degree": maxdeg,
            }))?;
            summary.push(format!("lambda_0 = {:e}; {zeros} parity zeros", spec.lambdas()[0]));
        }
        Experiment::ApproxSphere { d, s, p, profile, maxdeg, j_grid, slope_tol } => {
            let t = make_lp_target(SphereDim::new(*d)?, ReluOrder(*s), *p, profile, *maxdeg)?;
            let rep = sweep_filtered_approx(&t, &FilteredSweepConfig { j_grid: j_grid.clone(), slope_tol: *slope_tol })?;
            out.write("spectrum.csv", &t.spectrum.to_csv())?;
            out.sweep(&rep, "R(j) = F2 norm of g_j", "L2 error")?;
            summary.push(format!(
                "target Lp norm {:.6} (drift {:.3e}, discarded mass {:.3e})",
                t.lp_norm, t.lp_norm_drift, t.discarded_fraction
            ));
            summary.extend(verdict_lines(&rep));
        }
        Experiment::ApproxM { d, s, target, m_grid, n_train, n_test, train, slope_bar } => {
            let s = ReluOrder(*s);
            let (f, _) = ball_target(target, *d, s, seed)?;
            let wc = WidthSweepConfig {
                m_grid: m_grid.clone(),
                n_train: *n_train,
                n_test: *n_test,
                train: relus_core::learner::TrainConfig { seed, ..train.clone() },
                seed,
                slope_bar: *slope_bar,
            };
            let rep = sweep_m_approx(&*f, *d, s, &wc)?;
            out.sweep(&rep, "width m", "L2 error")?;
            summary.extend(verdict_lines(&rep));
        }
        Experiment::ApproxMollify { d, function, alpha, eps_grid, grid_per_axis, half_width, exact_tol } => {
            let f = SobolevTarget::new(*d, function.clone())?;
            let mc = MollifierSweepConfig {
                alpha: *alpha,
                eps_grid: eps_grid.clone(),
                grid_per_axis: *grid_per_axis,
                half_width: *half_width,
                exact_tol: *exact_tol,
            };
            let rep = sweep_mollifier(&f, &mc)?;
            out.sweep(&rep, "epsilon", "max grid error")?;
            summary.extend(verdict_lines(&rep));
        }
        Experiment::Train { d, s, target, n, noise, train, n_test, comparator_seeded } => {
            let s = ReluOrder(*s);
            let (f, comp) = ball_target(target, *d, s, seed)?;
            let data = sample_dataset(&*f, &target_id(target), *d, *n, *noise, seed)?;
            let tc = relus_core::learner::TrainConfig { seed, ..train.clone() };
            let comparator = if *comparator_seeded {
                Some(comp.as_ref().ok_or_else(|| {
                    CliError::Usage("comparator_seeded requires a barron target".into())
                })?)
            } else {
                None
            };
            let fit = train_erm(&data, s, &tc, comparator)?;
            let level = TruncationLevel::new(fit.truncation)?;
            let test = generalization_error(&fit.net, &*f, level, *n_test, task_rng(seed, 1).next_u64())?;
            out.write("data.csv", &data.to_csv())?;
            out.write("net.json", &(fit.net.to_json() + "\n"))?;
            out.write("fit.json", &(fit.to_json() + "\n"))?;
            out.write("points.csv", &format!("grid_value,error,stderr,replicate\n{:e},{:e},{:e},0\n", *n as f64, test.mean, test.stderr))?;
            out.report(serde_json::json!({
                "empirical_risk": fit.empirical_risk,
                "objective": fit.objective,
                "path_norm": fit.path_norm,
                "restart": fit.restart,
                "steps_taken": fit.steps_taken,
                "truncation": fit.truncation,
                "test_error": test,
            }))?;
            summary.push(format!(
                "empirical risk {:e}, objective {:e}, path norm {:.4}, test error {:e} ± {:.1e}",
                fit.empirical_risk, fit.objective, fit.path_norm, test.mean, test.stderr
            ));
        }
        Experiment::RateN {
            d,
            s,
            target,
            n_grid,
            replicates,
            noise,
            schedule,
            c_m,
            c_lambda,
            train,
            n_test,
            comparator_seeded,
            slope_bar,
            degenerate_tol,
        } => {
            let s = ReluOrder(*s);
            let (f, comp) = ball_target(target, *d, s, seed)?;
            if *comparator_seeded && comp.is_none() {
                return Err(CliError::Usage("comparator_seeded requires a barron target".into()));
            }
            let sc = SampleSweepConfig {
                n_grid: n_grid.clone(),
                replicates: *replicates,
                noise: *noise,
                schedule: *schedule,
                c_m: *c_m,
                c_lambda: *c_lambda,
                train: train.clone(),
                n_test: *n_test,
                seed,
                slope_bar: *slope_bar,
                degenerate_tol: *degenerate_tol,
            };
            let comparator = if *comparator_seeded { comp.as_ref() } else { None };
            let rep = sweep_n_generalization(&*f, *d, s, comparator, &sc)?;
            out.sweep(&rep, "sample size n", "squared truncated L2 error")?;
            summary.extend(verdict_lines(&rep));
        }
        Experiment::Complexity { d, s, path_bound, delta, delta_grid, n_grid, noise, trials, slope_tol } => {
            let rep = complexity(*d, ReluOrder(*s), *path_bound, *delta, delta_grid, n_grid, *noise, *trials, *slope_tol, seed)?;
            let mut csv = String::from("grid_value,error,stderr,replicate\n");
            for (n, e) in n_grid.iter().zip(&rep.estimates) {
                let _ = writeln!(csv, "{:e},{:e},{:e},0", *n as f64, e.mean, e.stderr);
            }
            out.write("points.csv", &csv)?;
            let pts: Vec<(f64, f64)> = n_grid.iter().zip(&rep.estimates).map(|(n, e)| (*n as f64, e.mean)).collect();
            out.plot(Chart {
                title: "local complexity (complexity)",
                x_label: "sample size n",
                y_label: "estimate",
                points: &pts,
                reference_slope: rep.reference_slope,
                fit: rep.fit.as_ref().map(|f| (f.slope, f.intercept)),
            })?;
            for v in &rep.verdicts {
                summary.push(format!("{}: {} ({})", v.name, if v.passed { "pass" } else { "FAIL" }, v.detail));
            }
            out.report(rep)?;
        }
    }
    Ok(summary)
}

fn verdict_lines(rep: &SweepReport) -> Vec<String> {
    let mut lines = vec![match &rep.fit {
        Some(f) => format!(
            "slope {:.4} [{:.4}, {:.4}], reference {:.4}, status {:?}",
            f.slope, f.ci_low, f.ci_high, rep.reference_slope, rep.status
        ),
        None => format!("no fit, status {:?}", rep.status),
    }];
    for v in &rep.verdicts {
        lines.push(format!("{}: {} ({})", v.name, if v.passed { "pass" } else { "FAIL" }, v.detail));
    }
    lines
}

#[derive(Debug, Serialize)]
pub struct ComplexityReport {
    pub delta: f64,
    pub n_grid: Vec<usize>,
    pub estimates: Vec<McEstimate>,
    pub delta_curve: Vec<f64>,
    /// `curves[k][r]`: estimate at `n_grid[k]` and `delta_curve[r]`.
    pub curves: Vec<Vec<McEstimate>>,
    pub fit: Option<RateFit>,
    pub reference_slope: f64,
    pub verdicts: Vec<relus_core::rates::Verdict>,
}

#[allow(clippy::too_many_arguments)]
pub fn complexity(
    d: usize,
    s: ReluOrder,
    path_bound: f64,
    delta: f64,
    delta_grid: &[f64],
    n_grid: &[usize],
    noise: relus_core::learner::NoiseModel,
    trials: usize,
    slope_tol: f64,
    seed: u64,
) -> Result<ComplexityReport, CliError> {
    if n_grid.len() < 3 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("n_grid needs at least 3 strictly increasing values".into()));
    }
    let mut deltas: Vec<f64> = delta_grid.iter().copied().chain(std::iter::once(delta)).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let at = deltas.iter().position(|&v| v == delta).expect("delta is in the curve");
    let reference = -theoretical_exponent(&ExponentQuery::new(ExponentKind::LocalComplexityN, d, s.get()))?.value;
    let mut curves = Vec::with_capacity(n_grid.len());
    for (k, &n) in n_grid.iter().enumerate() {
        let cfg = ComplexityConfig::new(d, s, path_bound, n, noise, trials, task_rng(seed, k as u64).next_u64());
        curves.push(local_complexity_curve(&cfg, &deltas)?);
    }
    let estimates: Vec<McEstimate> = curves.iter().map(|c| c[at]).collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.mean).collect();
    let mut verdicts = Vec::new();
    let fit = match fit_loglog(&xs, &ys, BOOTSTRAP_REPS, seed) {
        Ok(f) => {
            verdicts.push(relus_core::rates::Verdict {
                name: "slope_within_tolerance".into(),
                passed: (f.slope - reference).abs() <= slope_tol,
                detail: format!("slope {:.4} vs reference {reference} ± {slope_tol}", f.slope),
            });
            Some(f)
        }
        Err(Error::TooFewPoints { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let monotone = curves.iter().all(|c| c.windows(2).all(|w| w[1].mean >= w[0].mean));
    verdicts.push(relus_core::rates::Verdict {
        name: "monotone_in_delta".into(),
        passed: monotone,
        detail: format!("{} radii per sample size", deltas.len()),
    });
    Ok(ComplexityReport {
        delta,
        n_grid: n_grid.to_vec(),
        estimates,
        delta_curve: deltas,
        curves,
        fit,
        reference_slope: reference,
        verdicts,
    })
}
