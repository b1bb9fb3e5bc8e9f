//! Quadratic volume-preserving maps.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] – sparse multivariate polynomials and matrix-valued polynomials used
//!   for exact coefficient identities and compositions.
//! * [`polymap`] – the [`QuadMap`] representation, Jacobian determinant and
//!   quadratic-inverse predicates, explicit inversion and composition.
//! * [`shear`] – quadratic shears `x + ½(xᵀPx)v` in R³, recognition and iteration.
//! * [`normalform`] – affine normal forms of quadratic automorphisms of R³ and the
//!   reduction to the four-parameter generic family.
//! * [`symplectic`] – decomposition of quadratic symplectic maps and the
//!   gradient-shear normal form.
//! * [`dynamics`] – fixed points, stability, reversibility, escape bounds and orbits
//!   of the generic family.
//! * [`manifold`] – stable/unstable manifolds and heteroclinic intersection curves.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod normalform;
pub mod poly;
pub mod polymap;
pub mod shear;
pub mod symplectic;

pub use error::{Error, Result};
pub use polymap::{AffineMap, QuadMap};

/// Absolute tolerance used for "coefficient is zero" decisions unless overridden.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Crate version, embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
