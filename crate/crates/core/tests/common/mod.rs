#![allow(dead_code)]

use lattice_precoder::exact::ratio;
use lattice_precoder::linalg::jacobi_eigen;
use lattice_precoder::precoder::ChannelSpectrum;
use lattice_precoder::{QuadraticForm, Rational, UnimodularMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `BᵀB / q²` for an integer matrix `B` given row-major.
pub fn gram_from_integer_basis(n: usize, b: &[i64], q: i64) -> Option<QuadraticForm> {
    let mut packed = Vec::new();
    for i in 0..n {
        for j in i..n {
            let dot: i64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum();
            packed.push(ratio(dot as i128, (q * q) as i128));
        }
    }
    QuadraticForm::from_packed(n, packed).ok()
}

/// Whether every shortest vector of `g` is guaranteed to lie in the box of the given radius:
/// a shortest `x` has `ω_min |x|² <= G[x] <= min_i g_ii`.
pub fn box_suffices(g: &QuadraticForm, radius: i64) -> bool {
    let omega = jacobi_eigen(g.as_f64()).unwrap().values;
    let smallest = *omega.last().unwrap();
    let min_diag = (0..g.dim()).map(|i| g.as_f64()[(i, i)]).fold(f64::INFINITY, f64::min);
    min_diag / smallest <= (radius * radius) as f64 * (1.0 - 1e-9)
}

/// Random positive definite rational form `BᵀB / q²` with small entries, drawn until the box of
/// radius `radius` provably contains its shortest vectors.
pub fn random_form<R: Rng>(rng: &mut R, n: usize, radius: i64) -> QuadraticForm {
    loop {
        let q = [1, 2, 3, 5][rng.gen_range(0..4)];
        let b: Vec<i64> =
            (0..n * n).map(|k| if k % (n + 1) == 0 { rng.gen_range(1..=4) } else { rng.gen_range(-2..=2) }).collect();
        if let Some(g) = gram_from_integer_basis(n, &b, q) {
            if box_suffices(&g, radius) {
                return g;
            }
        }
    }
}

/// Product of random elementary integer column operations, swaps and sign flips.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> UnimodularMatrix {
    let mut z: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..steps {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..4) {
            0 if i != j => z.iter_mut().for_each(|row| row.swap(i, j)),
            1 => z.iter_mut().for_each(|row| row[i] = -row[i]),
            _ if i != j => {
                let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
                z.iter_mut().for_each(|row| row[i] += c * row[j]);
            }
            _ => {}
        }
    }
    UnimodularMatrix::from_rows(&z).unwrap()
}

pub fn random_spectrum<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> ChannelSpectrum {
    ChannelSpectrum::new((0..n).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

pub fn as_rational(x: i64) -> Rational {
    Rational::from_integer(x.into())
}
