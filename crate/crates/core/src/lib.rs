//! Minimum-distance linear precoders for non-singular Gaussian channels, built from perfect
//! quadratic forms, Minkowski reduction and exact lattice enumeration.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod codebook;
pub mod error;
pub mod exact;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod perfect;
pub mod precoder;
pub mod reduction;

pub use error::{Error, Result};
pub use exact::Rational;
pub use lattice::{GeneratorMatrix, MinVecSet, QuadraticForm, UnimodularMatrix};
