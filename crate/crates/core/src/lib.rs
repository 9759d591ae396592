//! Exact polynomial Fibonacci- and Lucas-type sequences over the rationals,
//! their `Q`-matrix representation, and a checker for the classical identities.
//!
//! ```
//! use qfib::catalog::builtin;
//! use qfib::sequences::term_iter;
//!
//! let fib = builtin("fibonacci").unwrap();
//! assert_eq!(term_iter(&fib, 5).to_string(), "x^4 + 3*x^2 + 1");
//! ```

pub mod catalog;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod identities;
pub mod poly;
pub mod polyparse;
pub mod qmatrix;
pub mod sequences;

pub use catalog::{FamilyPair, FamilySpec, Kind};
pub use error::{Error, Result};
pub use exactnum::{Integer, Rational};
pub use poly::Poly;
pub use qmatrix::Mat2;
