//! Geometry of the SRVF sphere and of the shape quotient by rotations and
//! reparameterizations.

mod align;
mod rotation;
mod sphere;
mod warping;

pub use align::{align, align_with, log_quotient, log_quotient_with, AlignConfig, Alignment};
pub use rotation::{optimal_rotation, Rotation};
pub use sphere::{
    exp_sphere, geodesic, geodesic_distance, log_sphere, TangentVector, ANTIPODAL_MARGIN,
    SMALL_ANGLE,
};
pub use warping::{optimal_warping, path_to_warp, Lattice, WarpingFunction, STEP};
