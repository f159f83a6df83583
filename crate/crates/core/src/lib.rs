// SPDX-License-Identifier: Apache-2.0

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Entropic fluctuation functionals, fluctuation relations and full counting
//! statistics for finite classical and quantum dynamical systems.

pub mod classical;
pub mod error;
pub mod fcs;
pub mod linalg;
pub mod measure;
pub mod models;
pub mod quadrature;
pub mod functionals;
pub mod quantum;
pub mod runner;

pub use error::{Error, Result};
