//! Smooth cutoff functions with small derivatives, the localized polynomial
//! kernels they induce on classical domains, tight needlet frames, and tools to
//! measure kernel decay.

pub mod cutoff;
pub mod decay;
pub mod error;
pub mod interp;
pub mod kernels;
pub mod needlets;
pub mod orthopoly;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
