//! Finite-element simulation of a stochastic thin-film equation with a
//! singular interface potential, plus the diagnostics used to check the
//! discrete estimates the scheme relies on.

// `!(x <= tol)` is deliberate throughout: NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod mesh;
pub mod noise;
pub mod operators;
pub mod physics;
pub mod plots;
pub mod quadrature;
pub mod scheme;
pub mod solver;

pub use error::{Error, Result};
