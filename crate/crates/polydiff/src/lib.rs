//! Exact computer algebra for logarithmic polydifferentials.
//!
//! The core objects are formal linear combinations of basis forms indexed by
//! tuples of repetition-free sequences of colored indices, together with a
//! concrete rational-function model used as an independent computational
//! route. On top of those sit highest-weight modules for symmetrizable
//! Cartan data, Knizhnik-Zamolodchikov and Gauss-Manin connection matrices,
//! and level-truncated conformal-block fibers with their diagonal-vanishing
//! criterion.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals,
//! optionally extended by named formal parameters.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cartan;
pub mod connection;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod model;
pub mod phi;
pub mod ratfunc;
pub mod rep;
pub mod scalar;
pub mod seq;
pub mod shuffle;
pub mod verify;
pub mod wzw;

pub use error::Error;
pub use scalar::{Poly, Rat, Scalar, Var};
pub use seq::{Idx, Key, Seq};
pub use shuffle::{PolyDiff, PolyDiffTensor};
