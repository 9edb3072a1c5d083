//! Numerical verification of Schur-type volume comparison: space-form special
//! functions, the matching radius `x(r)`, Dini-derivative monotonicity tests,
//! volume comparison on model surfaces and Toponogov hinge comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod geomlab;
pub mod hinge;
pub mod matching;
pub mod modelfn;
pub mod numeric;
pub mod realfn;
pub mod report;
mod scalar;

pub use error::{Error, Result};
pub use geomlab::{ModelManifold, RotSurface, TheoremAResult};
pub use hinge::{DistanceProfile, Hinge};
pub use matching::{MatchingCurve, MatchingPoint, MatchingProblem};
pub use modelfn::{Curvature, Dimension, ModelDomain};
pub use realfn::{DiniEstimate, DiniSide, FunctionSpec, HSchedule, Samples};
pub use report::{Check, Status, Tolerance, VerificationReport, ViolationWitness};
pub use scalar::Scalar;

pub type Curvature64 = Curvature<f64>;
pub type Curvature32 = Curvature<f32>;
pub type FunctionSpec64 = FunctionSpec<f64>;
pub type FunctionSpec32 = FunctionSpec<f32>;
pub type MatchingProblem64 = MatchingProblem<f64>;
pub type ModelManifold64 = ModelManifold<f64>;
pub type Hinge64 = Hinge<f64>;
