//! Minkowski reduction of Gram matrices and the `B = U·L·Z` factorization.

use nalgebra::DMatrix;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{gcd_slice, Rational};
use crate::lattice::{
    brute_force_scan, packed_index, packed_len, shortest_vectors, GeneratorMatrix, QuadraticForm, UnimodularMatrix,
};
use crate::linalg::{cholesky_upper, orthogonality_residual};
use crate::perfect::{evaluation_functional, extreme_rays, Functional};

/// Largest dimension accepted by [`minkowski_reduce`].
pub const MAX_REDUCTION_DIM: usize = 12;

/// Default box radius for [`is_minkowski_reduced`].
pub const DEFAULT_CHECK_BOX: i64 = 3;

/// `B = U · L · Z` with `U` orthogonal, `L` a reduced upper-triangular generator and `Z` unimodular.
#[derive(Debug, Clone)]
pub struct MinkowskiFactorization {
    pub u: DMatrix<f64>,
    pub l: GeneratorMatrix,
    pub z: UnimodularMatrix,
}

/// Greedy Minkowski reduction. Returns `(G_L, Z)` with `G_B = Zᵀ G_L Z` exactly.
///
/// Basis vector `i` is the shortest vector (by value, then support size, then lexicographically)
/// that extends the first `i − 1` choices to a basis of `Zᴺ`. Signs are then flipped left to
/// right so that `g_{i,i+1} >= 0`.
pub fn minkowski_reduce(g: &QuadraticForm) -> Result<(QuadraticForm, UnimodularMatrix)> {
    let n = g.dim();
    if n > MAX_REDUCTION_DIM {
        return Err(Error::InvalidDimension(n));
    }
    // columns of `w` are the reduced basis in the input coordinates
    let mut w = UnimodularMatrix::identity(n);
    let mut w_inv = UnimodularMatrix::identity(n);
    let mut prev = Rational::zero();
    for i in 0..n {
        let cols = w.columns();
        let cap = cols[i..].iter().map(|c| g.eval_numer(c)).min().expect("i < n");
        let cap = Rational::new(cap, g.denom());
        let mut bound = if prev.is_zero() { g.diagonal_entries().into_iter().min().expect("n >= 1") } else { prev };
        let chosen = loop {
            if bound > cap {
                bound = cap;
            }
            let found = shortest_vectors(g, &bound)?;
            let hit = found
                .into_iter()
                .filter_map(|(v, val)| {
                    let y = apply(&w_inv, &v);
                    (gcd_slice(&y[i..]) == 1).then_some((v, y, val))
                })
                .min_by_key(|(v, _, val)| (*val, v.iter().filter(|x| **x != 0).count()));
            if let Some(hit) = hit {
                break hit;
            }
            if bound == cap {
                return Err(Error::NumericalError("no extendable vector within the column bound".into()));
            }
            bound *= Rational::from_integer(2);
        };
        let (_, y, val) = chosen;
        prev = val;
        let e = completion(&y, i)?;
        w = w.mul(&e)?;
        w_inv = w.inverse()?;
    }

    let mut cols = w.columns();
    for i in 1..n {
        if g.inner(&cols[i - 1], &cols[i]) < Rational::zero() {
            cols[i].iter_mut().for_each(|x| *x = -*x);
        }
    }
    let w = UnimodularMatrix::from_columns(&cols)?;
    let reduced = g.transform(&w);
    Ok((reduced, w.inverse()?))
}

fn apply(m: &UnimodularMatrix, v: &[i64]) -> Vec<i64> {
    let n = m.dim();
    (0..n).map(|r| (0..n).map(|c| m.get(r, c) * v[c]).sum()).collect()
}

/// Unimodular `E = [[I, A], [0, U]]` whose column `i` equals `y`, where `y[i..]` is primitive.
fn completion(y: &[i64], i: usize) -> Result<UnimodularMatrix> {
    let n = y.len();
    let tail = &y[i..];
    let u = primitive_completion(tail)?;
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|c| {
            let mut e = vec![0i64; n];
            e[c] = 1;
            e
        })
        .collect();
    cols[i][..i].copy_from_slice(&y[..i]);
    for (k, col) in cols.iter_mut().enumerate().skip(i) {
        for r in i..n {
            col[r] = u[r - i][k - i];
        }
    }
    UnimodularMatrix::from_columns(&cols)
}

/// Square unimodular matrix (as rows) whose first column is the primitive vector `y`.
fn primitive_completion(y: &[i64]) -> Result<Vec<Vec<i64>>> {
    let m = y.len();
    let mut w: Vec<i64> = y.to_vec();
    let mut u: Vec<Vec<i64>> = (0..m).map(|r| (0..m).map(|c| i64::from(r == c)).collect()).collect();
    for k in (1..m).rev() {
        let (a, b) = (w[k - 1], w[k]);
        if b == 0 {
            continue;
        }
        let eg = a.extended_gcd(&b);
        let (g, x, z) = (eg.gcd, eg.x, eg.y);
        // M = [[x, z], [-b/g, a/g]] sends (a, b) to (g, 0); right-multiply u by M⁻¹
        let inv = [[a / g, -z], [b / g, x]];
        for row in u.iter_mut() {
            let (p, q) = (row[k - 1], row[k]);
            row[k - 1] = p
                .checked_mul(inv[0][0])
                .and_then(|s| q.checked_mul(inv[1][0]).and_then(|t| s.checked_add(t)))
                .ok_or(Error::Overflow)?;
            row[k] = p
                .checked_mul(inv[0][1])
                .and_then(|s| q.checked_mul(inv[1][1]).and_then(|t| s.checked_add(t)))
                .ok_or(Error::Overflow)?;
        }
        w[k - 1] = g;
        w[k] = 0;
    }
    match w[0] {
        1 => {}
        -1 => u.iter_mut().for_each(|row| row[0] = -row[0]),
        _ => return Err(Error::NumericalError(format!("vector {y:?} is not primitive"))),
    }
    Ok(u)
}

/// Checks the Minkowski conditions `G[v] >= g_ii` for every `v` with `‖v‖∞ <= box` and
/// `gcd(v_i, …, v_N) = 1`, and `g_{i,i+1} >= 0`. A finite check radius, not a proof.
pub fn is_minkowski_reduced(g: &QuadraticForm, box_radius: i64) -> bool {
    let n = g.dim();
    if (1..n).any(|i| g.get(i - 1, i) < Rational::zero()) {
        return false;
    }
    let diag: Vec<i128> = (0..n).map(|i| g.eval_numer(&unit(n, i))).collect();
    for v in brute_force_scan(n, box_radius) {
        let value = g.eval_numer(&v);
        for i in 0..n {
            if value < diag[i] && gcd_slice(&v[i..]) == 1 {
                return false;
            }
        }
    }
    true
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// Factorizes a basis as `B = U·L·Z`: `Z` comes from reducing `gram_of(B)`, `L` is the
/// upper Cholesky factor of the Gram of `B Z⁻¹`, and `U = B Z⁻¹ L⁻¹`.
#[allow(non_snake_case)]
pub fn factorize_ULZ(b: &GeneratorMatrix) -> Result<MinkowskiFactorization> {
    let g = b.gram()?;
    let (_, z) = minkowski_reduce(&g)?;
    let z_inv = z.inverse()?.to_f64();
    let bz = b.matrix() * z_inv;
    let gram = bz.transpose() * &bz;
    let l = cholesky_upper(&gram).ok_or(Error::DegenerateBasis(b.volume()))?;
    let l_inv = l.clone().try_inverse().ok_or_else(|| Error::NumericalError("reduced generator is singular".into()))?;
    let u = bz * l_inv;
    let residual = orthogonality_residual(&u);
    if residual > 1e-9 {
        return Err(Error::OrthogonalityCheckFailed(residual));
    }
    Ok(MinkowskiFactorization { u, l: GeneratorMatrix::new(l)?, z })
}

impl MinkowskiFactorization {
    /// `U · L · Z`.
    pub fn product(&self) -> DMatrix<f64> {
        &self.u * self.l.matrix() * self.z.to_f64()
    }
}

/// Largest dimension for which Minkowski's conditions with coefficients in `{0, ±1}` describe
/// the reduction domain.
pub const MAX_EXTREME_DIM: usize = 4;

/// Vertices of the reduction domain at `g₁₁ = 1`: the extreme rays of the Minkowski cone
/// with positive first entry, scaled so that `g₁₁ = 1`, in ray order. Rays with `g₁₁ = 0`
/// are recession directions and are dropped.
pub fn minkowski_extreme_forms(n: usize) -> Result<Vec<QuadraticForm>> {
    if !(2..=MAX_EXTREME_DIM).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    let mut ineqs: Vec<Functional> = Vec::new();
    for i in 0..n {
        let diag = evaluation_functional(&unit(n, i));
        for v in brute_force_scan(n, 1) {
            if v == unit(n, i) || gcd_slice(&v[i..]) != 1 {
                continue;
            }
            let a: Functional = evaluation_functional(&v).iter().zip(&diag).map(|(x, y)| x - y).collect();
            if a.iter().any(|x| *x != 0) && !ineqs.contains(&a) {
                ineqs.push(a);
            }
        }
    }
    for i in 1..n {
        let mut a = vec![0i128; packed_len(n)];
        a[packed_index(n, i - 1, i)] = 1;
        ineqs.push(a);
    }
    let mut out = Vec::new();
    for ray in extreme_rays(&ineqs, packed_len(n))? {
        let first = ray.direction[0];
        if first <= 0 {
            continue;
        }
        let packed = ray.direction.iter().map(|x| Rational::new(*x, first)).collect();
        out.push(QuadraticForm::from_packed(n, packed)?);
    }
    Ok(out)
}

/// `true` if `G[e₁]` is the form minimum, which every reduced form satisfies.
pub fn first_column_is_shortest(g: &QuadraticForm) -> Result<bool> {
    Ok(crate::lattice::min_distance(g)?.form_min == g.get(0, 0))
}
