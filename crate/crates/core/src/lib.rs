//! Numerical toolkit for curvature, collapse and conformal geometry of
//! four-manifold metric constructions.
//!
//! Every numerical kernel is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the orchestration
//! layers and the command-line tool use.

// `!(x > 0.0)` is deliberate wherever NaN must be rejected too, and the
// tensor kernels read best with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod characteristic;
pub mod conformal;
pub mod cutoff;
pub mod error;
pub mod frame;
pub mod glue;
pub mod jet;
pub mod linalg;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod submersion;
pub mod surface;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Jet = jet::Jet2<f64>;
pub type Frame = frame::CurvatureFrame<f64>;
pub type Metric = radial::RadialMetric<f64>;
pub type Profile = radial::RadialProfile<f64>;
