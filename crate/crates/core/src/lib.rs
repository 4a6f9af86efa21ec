//! Exact and numerical residue computations for 2-flags of singular
//! holomorphic foliations.
//!
//! The crate is organized around two independent computation paths that
//! cross-check each other:
//!
//! * an exact local-algebra path (multivariate polynomials over
//!   arbitrary-precision rationals, Gröbner and local standard bases,
//!   Milnor numbers), and
//! * a numerical path (Grothendieck residues via product trapezoid
//!   quadrature on small tori around isolated singular points).
//!
//! On top of those sit a symbolic exterior algebra for the
//! Godbillon-Vey-type forms, Chern-class arithmetic in the truncated
//! cohomology ring of projective space, and a flag layer that runs the
//! theorem-level identities (comparison of the two foliation residues,
//! the binomial identity, integrating-factor vanishing).
//!
//! The crate is `no_std` + `alloc`; all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cohomology;
pub mod expr;
pub mod flag;
pub mod forms;
pub mod ideal;
pub mod poly;
pub mod quad;
pub mod sample;
pub mod vars;

pub use expr::Expr;
pub use poly::{Monomial, MonomialOrder, Polynomial};
pub use vars::VarSet;

/// Arbitrary-precision rational, the coefficient domain everywhere.
pub type Rational = num_rational::BigRational;
/// Double-precision complex number, the numeric evaluation domain.
pub type C64 = num_complex::Complex64;
