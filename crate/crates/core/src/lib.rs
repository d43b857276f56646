//! Low-rank representation clustering of open curves.
//!
//! Curves are mapped to square-root velocity functions, compared in the shape
//! space that quotients out rotation and reparameterization, and clustered by
//! solving a nuclear-norm regularized self-expression problem in the tangent
//! spaces of that shape space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cluster;
pub mod curve;
pub mod datagen;
pub mod dataset;
pub mod elastic;
pub mod error;
pub mod gram;
pub mod pipeline;
pub mod plot;
pub mod solver;
pub mod srvf;

pub use cluster::ClusterLabels;
pub use curve::Curve;
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use srvf::Srvf;
