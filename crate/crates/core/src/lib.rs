//! Steerability of two-qubit states through geometric hidden-state models.
//!
//! States live in the Pauli (G-matrix) picture, assemblages in the probability Bloch
//! ball. A state is unsteerable for a measurement set when some g-model reproducing
//! its assemblage has total mass at most one; the minimal mass is found by linear
//! programming over a discretized sphere.

pub mod analytic;
pub mod assemblage;
pub mod error;
pub mod factory;
pub mod gmodel;
pub mod io;
pub mod lp;
pub mod qubit;
pub mod sphere;

pub use error::{Error, Result};
