//! Gram matrices of a few named lattices, normalized to minimum 1.

use super::form::QuadraticForm;
use crate::exact::{int, ratio, Rational};

fn from_halves(n: usize, twice: &[i128]) -> QuadraticForm {
    let packed: Vec<Rational> = twice.iter().map(|v| ratio(*v, 2)).collect();
    QuadraticForm::from_packed(n, packed).expect("named lattice is positive definite")
}

/// Minkowski-reduced hexagonal form `[[1, 1/2], [1/2, 1]]`.
pub fn hexagonal() -> QuadraticForm {
    QuadraticForm::from_packed(2, vec![int(1), ratio(1, 2), int(1)]).expect("positive definite")
}

/// Checkerboard lattice D4.
pub fn d4() -> QuadraticForm {
    #[rustfmt::skip]
    let twice = [
        2, 0, 1, 0,
           2, -1, 0,
              2, -1,
                  2,
    ];
    from_halves(4, &twice)
}

/// Root lattice A4 (tridiagonal, `-1/2` off the diagonal).
pub fn a4() -> QuadraticForm {
    #[rustfmt::skip]
    let twice = [
        2, -1, 0, 0,
           2, -1, 0,
               2, -1,
                   2,
    ];
    from_halves(4, &twice)
}

/// Face-centred cubic lattice (D3 ≅ A3) in its standard reduced basis.
pub fn fcc() -> QuadraticForm {
    #[rustfmt::skip]
    let twice = [
        2, 1, 1,
           2, 1,
              2,
    ];
    from_halves(3, &twice)
}
