//! Leading-order state and l1-norm coherence of three static Unruh-DeWitt
//! detectors coupled to a massless scalar vacuum beside a perfectly
//! reflecting plane, with a brute-force quadrature oracle for every closed
//! form.
//!
//! The kernels are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the accuracy
//! guarantees refer to.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod special_fn;
pub mod state;

pub use error::{Error, Result};
pub use geometry::{GeometryKind, Label, Pair};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type DetectorSpec64 = geometry::DetectorSpec<f64>;
pub type GeometryConfig64 = geometry::GeometryConfig<f64>;
pub type PairDistances64 = geometry::PairDistances<f64>;
pub type PairAmplitudes64 = closed_form::PairAmplitudes<f64>;
pub type Probabilities64 = closed_form::Probabilities<f64>;
pub type TripartiteState64 = state::TripartiteState<f64>;
pub type SquareMatrix64 = state::SquareMatrix<f64>;
pub type QuadratureSettings64 = oracle::QuadratureSettings<f64>;

pub type DetectorSpec32 = geometry::DetectorSpec<f32>;
pub type GeometryConfig32 = geometry::GeometryConfig<f32>;
pub type TripartiteState32 = state::TripartiteState<f32>;
