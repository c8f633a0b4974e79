//! Uniform convergence of normalized products of nonnegative 2x2 matrices,
//! Bernoulli convolutions in quadratic Pisot bases, and weak-Gibbs checks
//! for their fractional-part measures.

pub mod betanum;
pub mod classify;
pub mod cli;
pub mod dense;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod matcore;
pub mod measure;
pub mod prodsim;
pub mod scalar;

pub use error::Error;
