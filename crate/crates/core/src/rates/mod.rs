//! Exponent table, log–log rate fitting and the sweep drivers.

pub mod exponents;
mod fit;
mod sweep;

pub use exponents::{theoretical_exponent, Exponent, ExponentKind, ExponentQuery, Schedule};
pub use fit::{fit_loglog, RateFit};
pub use sweep::{
    sweep_filtered_approx, sweep_m_approx, sweep_mollifier, sweep_n_generalization,
    FilteredSweepConfig, MollifierSweepConfig, SampleSweepConfig, ScheduleKind, SweepPoint,
    SweepReport, SweepStatus, Verdict, WidthSweepConfig, BOOTSTRAP_REPS,
};
