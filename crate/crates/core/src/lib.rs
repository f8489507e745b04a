//! Kernel-based numerical differentiation stencils and their a posteriori
//! error certificates.

// `!(x > 0.0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accuracy;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod kernels;
pub mod linalg;
pub mod polyspace;
pub mod stencil;

pub use error::{Error, Result};
