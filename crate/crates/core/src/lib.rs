//! Hierarchical interpolative butterfly factorization for the 2-D electric
//! field integral equation.
//!
//! The crate builds an H-IDBF approximation of the TM-polarized EFIE
//! impedance matrix over a segmented contour, splits it into triangular
//! factors used as a preconditioner, and solves with TFQMR.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod efie;
pub mod error;
pub mod geometry;
pub mod hidbf;
pub mod id;
pub mod idbf;
pub mod linalg;
pub mod scaling;
pub mod solver;
pub mod specfn;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
