//! Target functions: zonal `L^p`-type integral representations, Barron atom
//! mixtures, smooth Sobolev test functions, and the maps between the ball and
//! the sphere.

mod barron;
mod lift;
mod lp;
mod mollify;
mod sobolev;

pub use barron::{make_barron_target, BarronTarget};
pub use lift::{lift_to_sphere, reverse_map, sphere_point, CAP_HEIGHT};
pub use lp::{make_lp_target, LpTypeTarget, Profile, SYNTHESIS_CUTOFF};
pub use mollify::{
    finite_difference, mollified_approx, Mollified, MollifierSpec, QMC_POINTS, TENSOR_ORDER,
};
pub use sobolev::{SobolevKind, SobolevTarget};
