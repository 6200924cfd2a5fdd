//! Fincke–Pohst enumeration of short lattice vectors and the quantities built on it.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed};

use super::form::{GeneratorMatrix, QuadraticForm};
use crate::error::{Error, Result};
use crate::exact::{is_canonical_sign, to_f64, Rational};
use crate::linalg::{cholesky_upper, jacobi_eigen};

/// Largest eigenvalue ratio accepted before exhaustive enumeration is refused.
pub const MAX_CONDITION: f64 = 1e6;

/// Minimal vectors of a form, one representative per ±pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinVecSet {
    /// The attained minimum λ.
    pub form_min: Rational,
    /// Sorted lexicographically; first nonzero coordinate positive.
    pub vectors: Vec<Vec<i64>>,
}

impl MinVecSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// All nonzero integer vectors (one per ±pair) with `G[x] <= bound`, with their exact values,
/// sorted by value and then lexicographically.
///
/// The float Cholesky factor drives the search with a `1e-6` safety margin on the bound;
/// every candidate is then re-checked in exact arithmetic.
pub fn shortest_vectors(g: &QuadraticForm, bound: &Rational) -> Result<Vec<(Vec<i64>, Rational)>> {
    if !bound.is_positive() {
        return Err(Error::Input(format!("enumeration bound must be positive, got {bound}")));
    }
    let bf = to_f64(bound);
    let found = float_candidates(g.as_f64(), bf + 1e-6 * bf.max(1.0))?;

    let bound_numer = bound * Rational::from_integer(g.denom());
    let mut out = Vec::with_capacity(found.len());
    for x in found {
        let v = g.eval_numer(&x);
        if Rational::from_integer(v) <= bound_numer {
            out.push((x, Rational::new(v, g.denom())));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// Integer vectors (one per ±pair) with `xᵀ G x <= budget` in floating point.
pub(crate) fn float_candidates(g: &DMatrix<f64>, budget: f64) -> Result<Vec<Vec<i64>>> {
    let n = g.nrows();
    let r = cholesky_upper(g).ok_or(Error::NotPositiveDefinite)?;
    let q: Vec<f64> = (0..n).map(|i| r[(i, i)] * r[(i, i)]).collect();
    let mu: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 }).collect()).collect();
    let mut search = Search { q: &q, mu: &mu, budget, x: vec![0i64; n], found: Vec::new() };
    search.descend(n - 1, 0.0);
    Ok(search.found)
}

/// Minimum of `xᵀ G x` over nonzero integer `x` for a floating-point Gram matrix.
pub fn float_min_distance(g: &DMatrix<f64>) -> Result<f64> {
    let e = jacobi_eigen(g)?;
    let lo = *e.values.last().unwrap_or(&0.0);
    if lo.is_nan() || lo <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    if e.values[0] / lo > MAX_CONDITION {
        return Err(Error::ConditioningError(e.values[0] / lo));
    }
    // a unit vector attains the smallest diagonal entry, so the search is never empty
    let budget = (0..g.nrows()).map(|i| g[(i, i)]).fold(f64::INFINITY, f64::min) * (1.0 + 1e-9);
    float_candidates(g, budget)?
        .iter()
        .map(|x| {
            let v = DVector::from_iterator(x.len(), x.iter().map(|c| *c as f64));
            (v.transpose() * g * &v)[(0, 0)]
        })
        .reduce(f64::min)
        .ok_or_else(|| Error::NumericalError("empty search below the smallest diagonal entry".into()))
}

struct Search<'a> {
    q: &'a [f64],
    mu: &'a [Vec<f64>],
    budget: f64,
    x: Vec<i64>,
    found: Vec<Vec<i64>>,
}

impl Search<'_> {
    fn descend(&mut self, level: usize, partial: f64) {
        let n = self.x.len();
        let center: f64 = -(level + 1..n).map(|j| self.mu[level][j] * self.x[j] as f64).sum::<f64>();
        let rem = self.budget - partial;
        if rem < 0.0 {
            return;
        }
        let radius = (rem / self.q[level]).sqrt();
        let lo = (center - radius).ceil() as i64;
        let hi = (center + radius).floor() as i64;
        for v in lo..=hi {
            self.x[level] = v;
            let d = v as f64 - center;
            let p = partial + self.q[level] * d * d;
            if p > self.budget {
                continue;
            }
            if level == 0 {
                if is_canonical_sign(&self.x) {
                    self.found.push(self.x.clone());
                }
            } else {
                self.descend(level - 1, p);
            }
        }
        self.x[level] = 0;
    }
}

fn check_conditioning(g: &QuadraticForm) -> Result<()> {
    let e = jacobi_eigen(g.as_f64())?;
    let lo = *e.values.last().unwrap_or(&0.0);
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let ratio = e.values[0] / lo;
    if ratio > MAX_CONDITION {
        return Err(Error::ConditioningError(ratio));
    }
    Ok(())
}

/// Exact minimum `λ = min G[x]` over nonzero integer `x`, with all attaining ±pairs.
pub fn min_distance(g: &QuadraticForm) -> Result<MinVecSet> {
    check_conditioning(g)?;
    // the smallest diagonal entry is attained by a unit vector, so the search is never empty
    let mut bound = g.diagonal_entries().into_iter().min().expect("dim >= 1");
    loop {
        let found = shortest_vectors(g, &bound)?;
        if let Some((_, lambda)) = found.first() {
            let lambda = *lambda;
            let vectors = found.into_iter().take_while(|(_, v)| *v == lambda).map(|(x, _)| x).collect();
            let mut set = MinVecSet { form_min: lambda, vectors };
            set.vectors.sort();
            return Ok(set);
        }
        bound *= Rational::from_integer(2);
    }
}

/// Second successive minimum in the value sense: the smallest `G[x]` strictly above `λ₁`.
pub fn successive_minimum_2(g: &QuadraticForm) -> Result<Rational> {
    let lambda1 = min_distance(g)?.form_min;
    let mut bound = lambda1 * Rational::from_integer(2);
    loop {
        let found = shortest_vectors(g, &bound)?;
        if let Some((_, v)) = found.iter().find(|(_, v)| *v > lambda1) {
            return Ok(*v);
        }
        bound *= Rational::from_integer(2);
    }
}

/// Fundamental volume `|det B|`.
pub fn volume(b: &GeneratorMatrix) -> f64 {
    b.volume()
}

/// Testing oracle: `min G[x]` over all nonzero `x` with `‖x‖∞ <= box_radius`, by direct scan.
pub fn brute_force_min(g: &QuadraticForm, box_radius: i64) -> Rational {
    brute_force_scan(g.dim(), box_radius).filter_map(|x| g.eval(&x).ok()).min().unwrap_or_else(Rational::one)
}

/// All nonzero integer vectors with `‖x‖∞ <= r` and first nonzero coordinate positive.
pub fn brute_force_scan(n: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as u64;
    let total = side.pow(n as u32);
    (0..total).filter_map(move |mut k| {
        let mut x = vec![0i64; n];
        for c in x.iter_mut() {
            *c = (k % side) as i64 - r;
            k /= side;
        }
        is_canonical_sign(&x).then_some(x)
    })
}
