//! Feasibility of `Ax = b, x >= 0` (continuous or integer) under
//! Johnson-Lindenstrauss random projections.
//!
//! The crate sketches the row space of a constraint system with a random
//! `k x m` map, solves the smaller system with an in-crate simplex / branch
//! and bound, and measures how often the sketch preserves the answer:
//!
//! - [`numerics`]: dense vectors and column-major matrices.
//! - [`projector`]: Gaussian, Rademacher and sparse sketches; `k` selection.
//! - [`bounds`]: closed-form success-probability lower bounds.
//! - [`solver`]: phase I/II dense simplex with Farkas certificates, and
//!   integer branch and bound.
//! - [`cone`]: separating margins, cone/hull projections, A-norms.
//! - [`gen`]: random instances with solver-certified labels.
//! - [`mc`]: Monte Carlo estimates and calibration of the constant `C`.
//! - [`bench`]: projected-vs-original accuracy and timing experiments.
//! - [`instance_file`]: the versioned JSON instance format.

// NaN-aware comparisons (`!(x > y)`) and index loops over several parallel
// arrays are deliberate throughout the numeric code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod bounds;
pub mod cone;
pub mod error;
pub mod gen;
pub mod instance_file;
pub mod mc;
pub mod numerics;
pub mod projector;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::{DenseMatrix, DenseVector};
pub use projector::{Projector, ProjectorFamily};
pub use solver::{Domain, FeasInstance, SolverOptions, Status, Verdict};
