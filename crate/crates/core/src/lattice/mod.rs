//! Exact lattice primitives: forms, bases, minimal vectors, isometry tests.

mod enumerate;
mod form;
mod isometry;
pub mod known;

pub use enumerate::{
    brute_force_min, brute_force_scan, float_min_distance, min_distance, shortest_vectors, successive_minimum_2,
    volume, MinVecSet, MAX_CONDITION,
};
pub use form::{packed_index, packed_len, GeneratorMatrix, QuadraticForm, UnimodularMatrix};
pub use isometry::{is_isometric, permutation_equivalent, signed_permutation_key, IsometryWitness};

/// `Bᵀ B` for a generator matrix.
pub fn gram_of(b: &GeneratorMatrix) -> crate::Result<QuadraticForm> {
    QuadraticForm::gram_of(b)
}

/// Upper-triangular generator `L` with `Lᵀ L = G`.
pub fn generator_of(g: &QuadraticForm) -> crate::Result<GeneratorMatrix> {
    g.generator()
}

/// Exact `xᵀ G x`.
pub fn quadratic_eval(g: &QuadraticForm, x: &[i64]) -> crate::Result<crate::exact::Rational> {
    g.eval(x)
}
