//! Height counting on PGL_d and SL_2 over the rationals.
//!
//! The crate computes the explicit objects that enter the asymptotic count of
//! rational group elements of bounded height:
//!
//! * [`building`]: sphere and ball sizes in the Bruhat-Tits building of
//!   `PGL_d(Q_p)`, with a brute-force lattice-class enumerator as oracle and
//!   local heights from elementary divisors.
//! * [`dirichlet`]: the multiplicative coefficients `D(m)`, the Dirichlet series
//!   `L(s) = Σ D(m) m^{-s}` via Euler products and zeta closed forms, pole
//!   abscissas and residues.
//! * [`archimedean`]: type `A_{d-1}` root data, the Weyl-chamber norm, Cartan
//!   integrals for archimedean ball volumes and heights from singular values.
//! * [`adelic`]: global heights, the adelic ball-volume convolution, counting
//!   predictions and empirical regularity/persistence checks.
//! * [`counting`]: exact enumeration of `PGL_2(Q)` elements of bounded height.
//! * [`verify`]: the acceptance checks, shared by the test suite and the CLI.

#![allow(clippy::approx_constant, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adelic;
pub mod archimedean;
pub mod arith;
pub mod building;
pub mod counting;
pub mod dirichlet;
mod error;
pub mod format;
pub mod samples;
pub mod verify;

pub use error::{Error, Result};

#[cfg(test)]
mod pipeline_tests;
