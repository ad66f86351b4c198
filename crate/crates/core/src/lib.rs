//! Biorthogonal polynomials of a two-matrix model and determinant
//! formulas for averages of ratios of characteristic polynomials.

pub mod biortho;
pub mod cli;
pub mod error;
pub mod evaluator;
pub mod expr;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod sampling;
pub mod summation;
pub mod verify;
pub mod wick;

pub use biortho::BiorthoSystem;
pub use error::{Error, Result};
pub use evaluator::{evaluate, CaseKind, EvalReport, InsertionSpec};
pub use kernels::KernelContext;
pub use measure::{Atom, Measure};
pub use num_complex::Complex64;
