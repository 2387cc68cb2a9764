//! Numerical laboratory for the nonlocal heat semigroup ∂ₜu + L_J u = 0 with
//! radial Lévy kernels J, driven through the Fourier multiplier m(ξ) of L_J.

pub mod analysis;
pub mod bessel;
pub mod config;
pub mod datum;
pub mod error;
pub mod evolve;
pub mod exec;
pub mod io;
pub mod kernels;
pub mod quad;
pub mod runner;
pub mod spectral;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
