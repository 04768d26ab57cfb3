//! Dwell-time stability certification for switched linear systems.
//!
//! The crate synthesizes piecewise-quadratic Lyapunov certificates for
//! systems `x' = A_sigma x` under dwell-time switching: an LMI baseline
//! with a single quadratic per mode, a path-following refinement that
//! grows the number of quadratic pieces, bisection on the dwell time,
//! and independent eigenvalue-based verification of every certificate.
//!
//! The library is `no_std` (with `alloc`); all IO lives in the `dwellcert`
//! companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod certifier;
pub mod error;
pub mod lmi;
pub mod lyapunov;
pub mod mat;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use mat::{EigenResult, SquareMatrix, SymMatrix};
