//! An exact polynomial model of first-order differential structure.
//!
//! The base category has natural numbers as objects and tuples of
//! multivariate polynomials over arbitrary-precision rationals as
//! morphisms. On top of it the crate builds:
//!
//! - the simple fibration with its stationary forward-derivative section
//!   and the first-order CDC axiom checks ([`simple`]),
//! - the additive simple fibration, fibrewise monoids, and the gCDC
//!   checks ([`splus`]),
//! - the lens fibration with the reverse-derivative section and the RDC
//!   axiom checks ([`lens`]),
//! - the reverse-to-forward pipeline through iterated lenses and its
//!   closed form ([`rdc2cdc`]),
//! - trivial bundles, the tangent endofunctor, and the tangent-structure
//!   checks ([`tangent`]),
//! - trivializations, differential objects, and the derivative induced
//!   on them ([`linearity`]).
//!
//! Every law is decided by exact polynomial identity: two morphisms are
//! equal iff their canonical forms are equal, so the axiom suites are
//! decision procedures, not approximate tests. Floating point appears in
//! exactly one place, the finite-difference cross-check in [`harness`].
//!
//! The `fodlab` binary exposes the derivative operators and the suites
//! on the command line; see the repository README for usage.

pub mod expr;
pub mod gen;
pub mod harness;
pub mod lens;
pub mod linearity;
pub mod poly;
pub mod polymap;
pub mod rdc2cdc;
pub mod report;
pub mod simple;
pub mod splus;
pub mod tangent;

pub use poly::{Poly, Rational};
pub use polymap::PolyMap;
pub use report::{AxiomReport, Counterexample, LawRecord};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Exponent vectors, variable indices, or point lengths out of range.
    #[error("arity error: {0}")]
    Arity(String),
    /// Domain/codomain dimensions do not line up for an operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Source/target objects of fibration morphisms do not match.
    #[error("object mismatch: {0}")]
    Object(String),
    /// Expression or map-literal syntax error; `offset` is a byte offset.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    /// A suite instance whose declared structure fails its own laws.
    #[error("invalid instance: {0}")]
    Instance(String),
    /// A value that violates a documented invariant of its type.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Suite dispatch on an unrecognised suite id.
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
