//! Exact truncated q-series engine for the Macdonald index of the
//! `(A1, D_{2k+1})` Argyres–Douglas theories.
//!
//! The crate computes the bosonic single-sum, the two fermionic multisums and
//! the Dynkin-data multisum of the index as truncated series in `q`, `t` and a
//! Laurent variable `z`, and implements the Bailey-pair machinery (pairs,
//! chains, conjugate pairs and their well-poised variants) together with the
//! terminating basic hypergeometric evaluations the duality between those
//! representations rests on. Every identity is checked as an exact equality,
//! either in the truncated series ring or at rational points.

pub mod bailey;
pub mod error;
pub mod hypergeometric;
pub mod macdonald;
pub mod qfunctions;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use report::{IdentityReport, Mismatch, Status};
pub use series::{Monomial, Rational, Series, Substitution, Truncation, Var};
