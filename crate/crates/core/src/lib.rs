//! Dirac–Hartree field dynamics with classically moving point nuclei on a
//! periodic pseudospectral grid.

// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod analysis;
pub mod config;
pub mod dirac;
pub mod error;
pub mod experiment;
pub mod groundstate;
pub mod hartree;
pub mod lattice;
pub mod newton;
pub mod potentials;
pub mod propagator;
pub mod quadrature;

pub use error::{Error, Result};
