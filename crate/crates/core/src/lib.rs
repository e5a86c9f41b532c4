//! Matrix models of finite flat strict `O0`-module schemes over `O = k[[pi]]`.
//!
//! A module is a free `O`-module of rank `n` with a `sigma`-semilinear
//! Frobenius `Phi` (matrix `C`) and a nilpotent `O`-linear action of `pi0`
//! (matrix `D`). Everything here is exact: residue fields are tabulated finite
//! fields, elements of `O` and `K = k((pi))` are truncated series with tracked
//! absolute precision, and ramification data is kept in rationals.
//!
//! Conventions used throughout: matrices act on row vectors of basis
//! elements, so `Phi(m) = C m` and `[pi0] m = D m` for the column of basis
//! vectors `m`. A morphism `M1 -> M2` is an `n1 x n2` matrix `U` with
//! `C1 U = sigma(U) C2` and `D1 U = U D2`; the composite "first `U`, then `V`"
//! has matrix `U V`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod base;
pub mod divisible;
pub mod error;
pub mod field;
pub mod hopf;
pub mod kmat;
pub mod matrix;
pub mod modcat;
pub mod points;
pub mod ramif;
pub mod series;
pub mod sh;

pub use base::BaseData;
pub use error::{Error, Result};
pub use field::{ff_arith, FieldElem, FieldOp, GaloisField};
pub use matrix::SeriesMatrix;
pub use modcat::{ModuleHom, ShortExactSequence, SigmaModule};
pub use series::{Series, SeriesRing, Verdict};

/// Rational numbers used for valuations and ramification data.
pub type Q = num_rational::Ratio<i64>;
