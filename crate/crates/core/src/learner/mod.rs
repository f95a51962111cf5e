//! Sampling, path-norm regularized training, truncated prediction and Monte
//! Carlo error estimates.

mod complexity;
mod data;
mod eval;
mod train;

pub use complexity::{local_complexity_curve, local_complexity_mc, ComplexityConfig};
pub use data::{sample_dataset, sample_uniform_ball, uniform_ball_point, Dataset, NoiseKind, NoiseModel};
pub use eval::{generalization_error, predict_truncated, McEstimate};
pub use train::{config_hash, regularized_objective, train_erm, FitResult, PathNormSummary, TrainConfig};
