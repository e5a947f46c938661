//! Explicit short-time heat kernel bounds that hold for every non-negative
//! self-adjoint realization of the Laplacian on a domain, together with
//! exactly solvable kernels to check them against.
//!
//! The bounds are assembled in [`bounds`] from the universal constants in
//! [`constants`] and the cutoff integral J_m of [`jm`]. The oracles live in
//! [`kernels`] and [`spectrum`], and [`harness`] drives sweeps and reports.

pub mod bounds;
pub mod constants;
pub mod cutoff;
pub mod error;
pub mod harness;
pub mod jm;
pub mod kernels;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
