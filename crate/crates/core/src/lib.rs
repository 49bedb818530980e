//! Exact computation and verification of stationary descendant
//! Gromov-Witten invariants of projective spaces.
//!
//! * [`arith`]: rationals, atoms, (quasi-)polynomials, Laurent series.
//! * [`psi`]: psi-class intersection numbers on moduli of curves.
//! * [`engine`]: the recursive evaluator for invariants of `P^N`.
//! * [`fit`]: quasi-polynomial reconstruction and the structural checks.
//! * [`eo`]: Eynard-Orantin recursion on `x = z + 1/z` and its comparison
//!   with the generating functions of `P^1`.

pub mod arith;
pub mod engine;
pub mod eo;
pub mod error;
pub mod fit;
pub mod psi;
pub mod report;

pub use error::{Error, Result};
