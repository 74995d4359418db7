//! Steady-state quantum correlations of a five-mode magnon–phonon–photon
//! system with coherent feedback and a Barnett-shifted magnon.
//!
//! The pipeline runs from [`SystemParams`] through the linearized
//! [`LinearModel`], a stability gate and the Lyapunov solve to Gaussian
//! measures on the resulting [`CovarianceMatrix`].

// `!(x > tol)` is deliberate throughout: NaN has to fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod mean_field;
pub mod measures;
pub mod model;
pub mod params;
pub mod scalar;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use lyapunov::CovarianceMatrix;
pub use measures::{MeasureKind, MeasureSet};
pub use model::LinearModel;
pub use params::{DriveParams, Mode, SystemParams};
pub use scalar::Real;
pub use sweep::{run_point, run_sweep, MeasureReport, ResultTable, SweepSpec};

pub type Covariance = CovarianceMatrix<f64>;
pub type Covariance32 = CovarianceMatrix<f32>;
pub type Model = LinearModel<f64>;
pub type Model32 = LinearModel<f32>;
