//! Dense complex linear algebra for Sylvester-like matrix equations
//!
//! ```text
//! A·X + f(X)·B = C
//! ```
//!
//! where `f` is a structured period-2 operator (identity, transpose,
//! conjugation, conjugate transpose, or a permutation congruence).
//!
//! The crate covers solvability tests built on generalized spectra,
//! Kronecker, reduction and closed-form solvers, Laurent machinery for regular
//! pencils, and a Newton solver for the Riccati equation behind palindromic
//! quadratic eigenvalue problems.

pub mod error;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod operator;
pub mod palindromic;
pub mod pencil;
pub mod solvability;
pub mod solvers;

pub use error::{Error, Result};
pub use matrix::{c64, Matrix};
pub use num_complex::Complex64;
pub use operator::{Algebra, LinearMap, OperatorKind, Permutation, ScalarMap, StructuredOperator};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/solvability.md")]
    mod solvability {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/pencils.md")]
    mod pencils {}
    #[doc = include_str!("../../../book/src/palindromic.md")]
    mod palindromic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
