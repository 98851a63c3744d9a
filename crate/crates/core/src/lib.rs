//! Exact harmonic analysis on a non-archimedean local field.
//!
//! Everything is computed in exact arithmetic over a cyclotomic tower
//! extended by the square roots the formulas need; every identity the
//! crate asserts can be re-checked through a complex embedding.

pub mod bruhat;
pub mod cyclo;
pub mod error;
pub mod gridspace;
pub mod invariant;
pub mod localfield;
pub mod modfn;
pub mod mult;
pub mod padic;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{FieldParams, LogQ, Scalar, ScalarContext};
