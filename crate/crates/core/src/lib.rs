//! Preconditioned pure-pixel search for near-separable nonnegative matrix
//! factorization.
//!
//! The crate provides the successive projection algorithm ([`spa`]), three
//! preconditioners built on top of it ([`precond`]), a first-order solver for
//! the origin-centred minimum-volume enclosing ellipsoid ([`mvee`]), synthetic
//! near-separable generators ([`model`]) and executable forms of the
//! robustness bounds and recovery metrics ([`analysis`]).
//!
//! Everything here is `no_std` with `alloc`; file formats, timing and the
//! command line live in the `spaprec` companion crate.
#![no_std]
#![deny(unsafe_code)]
// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod linalg;
pub mod model;
pub mod mvee;
mod num;
pub mod precond;
pub mod seed;
pub mod spa;

pub use error::{Error, Result};
pub use model::{DirichletParams, NearSeparableInstance, NoiseScope};
pub use mvee::{EllipsoidSolution, MveeOptions};
pub use precond::{Method, Preconditioner, PreconditionerKind, TruncatedSvd};
pub use spa::ExtractionResult;

/// Dense column-major matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
