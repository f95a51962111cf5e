//! Spectral calculus for zonal functions on the sphere `S^d ⊂ ℝ^{d+1}`.
//!
//! Every spherical function in this crate is zonal, `g(u) = h(u·e)` for a
//! fixed pole `e`, so integrals over `S^d` reduce to weighted integrals over
//! `[-1, 1]` and all operators below act diagonally on Gegenbauer modes.

mod funk_hecke;
mod gegenbauer;
mod integrate;
mod zonal;

pub use funk_hecke::{
    closed_form_lambda, funk_hecke_coeff, parity_vanishes, FunkHeckeSpectrum, PARITY_SNAP_TOL,
};
pub use gegenbauer::{
    area_ratio, gegenbauer_all, gegenbauer_eval, harmonic_dim, harmonic_dim_f64, sphere_area,
    SphereDim,
};
pub use integrate::{zonal_mean, ProfileShape, ZonalRule};
pub use zonal::{
    apply_funk_hecke, cutoff_eta, difference_norm, f2_norm, filtered_approx, laplace_multiplier,
    modulus_of_smoothness, parseval_norm, project_zonal, project_zonal_all, translate,
    ZonalSpectrum, MODULUS_GRID,
};
