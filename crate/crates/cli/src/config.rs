//! Strict JSON experiment configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use relus_core::learner::{NoiseModel, TrainConfig};
use relus_core::rates::ScheduleKind;
use relus_core::targets::{Profile, SobolevKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every random stream derives from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Emit `plot.svg` next to the CSV.
    #[serde(default)]
    pub plot: bool,
    pub experiment: Experiment,
}

/// Functions on the unit ball used as regression or approximation targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BallTarget {
    /// Random atom mixture with unit path norm; `target_seed` defaults to the master seed.
    Barron {
        atoms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_seed: Option<u64>,
    },
    Sobolev { function: SobolevKind },
    /// Zonal integral target pulled back to the ball.
    Lp { p: f64, profile: Profile, maxdeg: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Spectrum {
        d: usize,
        s: u32,
        maxdeg: usize,
    },
    ApproxSphere {
        d: usize,
        s: u32,
        p: f64,
        profile: Profile,
        maxdeg: usize,
        j_grid: Vec<usize>,
        #[serde(default = "slope_tol")]
        slope_tol: f64,
    },
    ApproxM {
        d: usize,
        s: u32,
        target: BallTarget,
        m_grid: Vec<usize>,
        n_train: usize,
        n_test: usize,
        #[serde(default)]
        train: TrainConfig,
        #[serde(default = "width_bar")]
        slope_bar: f64,
    },
    ApproxMollify {
        d: usize,
        function: SobolevKind,
        alpha: u32,
        eps_grid: Vec<f64>,
        #[serde(default = "grid_per_axis")]
        grid_per_axis: usize,
        #[serde(default = "one")]
        half_width: f64,
        #[serde(default = "exact_tol")]
        exact_tol: f64,
    },
    Train {
        d: usize,
        s: u32,
        target: BallTarget,
        n: usize,
        noise: NoiseModel,
        #[serde(default)]
        train: TrainConfig,
        n_test: usize,
        /// Seed restart 0 at the target network (Barron targets only).
        #[serde(default)]
        comparator_seeded: bool,
    },
    RateN {
        d: usize,
        s: u32,
        target: BallTarget,
        n_grid: Vec<usize>,
        replicates: usize,
        noise: NoiseModel,
        schedule: ScheduleKind,
        #[serde(default = "one")]
        c_m: f64,
        #[serde(default = "one")]
        c_lambda: f64,
        #[serde(default)]
        train: TrainConfig,
        n_test: usize,
        #[serde(default)]
        comparator_seeded: bool,
        #[serde(default = "n_bar")]
        slope_bar: f64,
        #[serde(default = "degenerate_tol")]
        degenerate_tol: f64,
    },
    Complexity {
        d: usize,
        s: u32,
        path_bound: f64,
        /// Radius used for the slope in `n`.
        delta: f64,
        /// Extra radii for the monotonicity curve.
        #[serde(default)]
        delta_grid: Vec<f64>,
        n_grid: Vec<usize>,
        noise: NoiseModel,
        trials: usize,
        #[serde(default = "complexity_tol")]
        slope_tol: f64,
    },
}

fn slope_tol() -> f64 {
    0.15
}
fn complexity_tol() -> f64 {
    0.15
}
fn width_bar() -> f64 {
    -0.5
}
fn n_bar() -> f64 {
    -0.35
}
fn grid_per_axis() -> usize {
    9
}
fn one() -> f64 {
    1.0
}
fn exact_tol() -> f64 {
    1e-8
}
fn degenerate_tol() -> f64 {
    1e-10
}

impl Experiment {
    pub fn command(&self) -> &'static str {
        match self {
            Experiment::Spectrum { .. } => "spectrum",
            Experiment::ApproxSphere { .. } => "approx-sphere",
            Experiment::ApproxM { .. } => "approx-m",
            Experiment::ApproxMollify { .. } => "approx-mollify",
            Experiment::Train { .. } => "train",
            Experiment::RateN { .. } => "rate-n",
            Experiment::Complexity { .. } => "complexity",
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_strictness() {
        let text = r#"{
            "seed": 3,
            "plot": true,
            "experiment": {
                "command": "rate-n", "d": 2, "s": 1,
                "target": {"kind": "barron", "atoms": 5},
                "n_grid": [64, 128, 256], "replicates": 2,
                "noise": {"kind": "gaussian", "sigma": 0.1},
                "schedule": {"kind": "barron_case"},
                "train": {"steps": 10},
                "n_test": 200
            }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiment.command(), "rate-n");
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);

        let extra = text.replace("\"plot\": true", "\"plot\": true, \"colour\": 1");
        assert!(ExperimentConfig::from_json(&extra).is_err());
        let inner = text.replace("\"n_test\": 200", "\"n_test\": 200, \"bogus\": 0");
        assert!(ExperimentConfig::from_json(&inner).is_err());
        let train = text.replace("\"steps\": 10", "\"stepz\": 10");
        assert!(ExperimentConfig::from_json(&train).is_err());
    }
}
