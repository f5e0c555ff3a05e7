pub mod cli;
pub mod counterexample;
pub mod error;
pub mod json;
pub mod kernel;
pub mod numerics;
pub mod quadrature;
pub mod spaces;
pub mod toeplitz;

pub use error::{Error, Result};
