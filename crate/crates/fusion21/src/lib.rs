//! Numerical toolkit for the spin-1 fusion of the eight-vertex model and the
//! 2x2 fusion SOS model: theta functions, R-matrices, face weights,
//! intertwining vectors, corner transfer matrix spectra and free-field OPE
//! prefactors, together with a seeded suite of identity checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod elliptic;
pub mod error;
pub mod face_weights;
pub mod identity_suite;
pub mod intertwiners;
pub mod numerics;
pub mod ope_algebra;
pub mod params;
pub mod report;
pub mod series;
pub mod spectra;
pub mod vertex_weights;

pub use error::{Error, Result};
pub use params::ModelParams;
pub use report::CheckReport;
pub use series::TruncatedSeries;
pub use vertex_weights::WeightTensor;
