//! Numerical ranges of trace-class pairings on a separable Hilbert space,
//! computed through finite truncations.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`planarsets`]: compact planar sets as finite point clouds (Hausdorff
//!   metric, hulls, star-shapedness, Kuratowski limits).
//! * [`opmodel`]: operators given in a fixed orthonormal basis, truncation,
//!   traces, trace norms, Schmidt decompositions and modified eigenvalue
//!   sequences.
//! * [`finrange`]: finite-dimensional engines for `W_C(A)` and `P_C(A)`.
//! * [`limits`]: truncation sequences, essential numerical range estimates and
//!   permutation-sum sets.
//! * [`dilation`]: unitary dilation of contractions.
//! * [`cli`]: job configuration, pipelines, the regression harness and SVG
//!   output behind the `specrange` binary.

pub mod cli;
pub mod dilation;
pub mod error;
pub mod finrange;
pub mod limits;
pub mod linalg;
pub mod matching;
pub mod opmodel;
pub mod planarsets;

pub use error::{Error, Result};
pub use num_complex::Complex64;
