//! Quadrature, root bracketing, grids and limit extrapolation.

pub mod extrapolate;
pub mod grid;
pub mod quad;
pub mod root;

pub use extrapolate::limit_at_zero;
pub use grid::{linspace, logspace};
pub use quad::{integrate, QuadOptions};
pub use root::{bracketed_root, Root, RootOptions};
