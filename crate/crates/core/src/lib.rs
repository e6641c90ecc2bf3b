//! Amended radiation-reaction dynamics of a jiggling dipole: memory kernel,
//! spectral distribution, positive-real certification and trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod com_dynamics;
pub mod dynamics;
pub mod error;
pub mod flo;
pub mod kernel;
pub mod model;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};
