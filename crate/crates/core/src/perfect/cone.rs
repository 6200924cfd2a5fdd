//! Polyhedral cones on the packed space of symmetric matrices: minimal-vector functionals
//! and extreme rays by the double-description method.

use crate::error::{Error, Result};
use crate::exact::{normalize_primitive, rank_i128, Rational};
use crate::lattice::{packed_index, packed_len, MinVecSet};

/// Integer functional on packed symmetric matrices, `T ↦ Σ c_k t_k`.
pub type Functional = Vec<i128>;

/// Coefficients of `T ↦ xᵀ T x` on the packed coordinates (off-diagonal terms doubled).
pub fn evaluation_functional(x: &[i64]) -> Functional {
    let n = x.len();
    let mut c = vec![0i128; packed_len(n)];
    for i in 0..n {
        for j in i..n {
            let p = x[i] as i128 * x[j] as i128;
            c[packed_index(n, i, j)] = if i == j { p } else { 2 * p };
        }
    }
    c
}

/// One functional `T ↦ T[x]` per minimal ±pair.
pub fn minimal_cone_inequalities(mv: &MinVecSet) -> Vec<Functional> {
    mv.vectors.iter().map(|x| evaluation_functional(x)).collect()
}

/// An extreme ray of a cone, stored as a primitive integer vector on the packed coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RayDirection {
    pub dim: usize,
    pub direction: Vec<i128>,
}

impl RayDirection {
    pub fn entries(&self) -> Vec<Rational> {
        self.direction.iter().map(|v| Rational::from_integer(*v)).collect()
    }

    /// `T[x]`, exact.
    pub fn eval(&self, x: &[i64]) -> i128 {
        dot(&evaluation_functional(x), &self.direction)
    }
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn checked_dot(a: &[i128], b: &[i128]) -> Result<i128> {
    a.iter()
        .zip(b)
        .try_fold(0i128, |acc, (x, y)| x.checked_mul(*y).and_then(|p| acc.checked_add(p)).ok_or(Error::Overflow))
}

#[derive(Clone)]
struct Ray {
    v: Vec<i128>,
    tight: Vec<u64>,
}

fn set_bit(bits: &mut [u64], k: usize) {
    bits[k / 64] |= 1 << (k % 64);
}

fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn contains(outer: &[u64], a: &[u64], b: &[u64]) -> bool {
    outer.iter().zip(a.iter().zip(b)).all(|(o, (x, y))| (x & y) & !o == 0)
}

/// Extreme rays of `{t ∈ Qᵈ : a·t >= 0 for every functional a}` by double description.
///
/// Starts from `d` independent inequalities (a simplicial cone whose rays are the columns of
/// the inverse) and adds the remaining ones one at a time; a pair of rays on opposite sides of
/// the new hyperplane is combined only when it is adjacent (combinatorial test). Rays come
/// back as primitive integer vectors, sorted.
pub fn extreme_rays(ineqs: &[Functional], dim: usize) -> Result<Vec<RayDirection>> {
    if ineqs.iter().any(|a| a.len() != dim) {
        return Err(Error::DimError {
            expected: dim,
            got: ineqs.iter().map(Vec::len).find(|l| *l != dim).unwrap_or(0),
        });
    }
    let (basis, rest) = split_basis(ineqs, dim)?;
    let words = ineqs.len().div_ceil(64).max(1);

    let mut rays: Vec<Ray> = simplicial_rays(&basis.iter().map(|&k| ineqs[k].clone()).collect::<Vec<_>>())?
        .into_iter()
        .enumerate()
        .map(|(j, v)| {
            let mut tight = vec![0u64; words];
            for (r, &k) in basis.iter().enumerate() {
                if r != j {
                    set_bit(&mut tight, k);
                }
            }
            Ray { v, tight }
        })
        .collect();

    for &k in &rest {
        let a = &ineqs[k];
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::with_capacity(rays.len());
        for ray in rays.iter() {
            let s = checked_dot(a, &ray.v)?;
            match s.signum() {
                1 => pos.push((ray, s)),
                -1 => neg.push((ray, s)),
                _ => {
                    let mut r = ray.clone();
                    set_bit(&mut r.tight, k);
                    next.push(r);
                }
            }
        }
        let needed = dim.saturating_sub(2) as u32;
        let mut created = Vec::new();
        for (p, sp) in &pos {
            for (q, sq) in &neg {
                if and_count(&p.tight, &q.tight) < needed {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .all(|r| std::ptr::eq(r, *p) || std::ptr::eq(r, *q) || !contains(&r.tight, &p.tight, &q.tight));
                if !adjacent {
                    continue;
                }
                // sp > 0 > sq: sp·q − sq·p lies on the hyperplane
                let mut v = Vec::with_capacity(dim);
                for (x, y) in q.v.iter().zip(&p.v) {
                    let t = sp
                        .checked_mul(*x)
                        .and_then(|s| (-sq).checked_mul(*y).and_then(|u| s.checked_add(u)))
                        .ok_or(Error::Overflow)?;
                    v.push(t);
                }
                normalize_primitive(&mut v);
                let mut tight: Vec<u64> = p.tight.iter().zip(&q.tight).map(|(x, y)| x & y).collect();
                set_bit(&mut tight, k);
                created.push(Ray { v, tight });
            }
        }
        next.extend(pos.into_iter().map(|(r, _)| r.clone()));
        next.extend(created);
        rays = next;
    }

    let mut out: Vec<RayDirection> = rays.into_iter().map(|r| RayDirection { dim, direction: r.v }).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Picks `dim` linearly independent functionals (greedily, in input order).
fn split_basis(ineqs: &[Functional], dim: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(dim);
    let mut rest = Vec::new();
    for (k, a) in ineqs.iter().enumerate() {
        if basis.len() < dim {
            rows.push(a.clone());
            if rank_i128(&rows)? == rows.len() {
                basis.push(k);
                continue;
            }
            rows.pop();
        }
        rest.push(k);
    }
    if basis.len() < dim {
        return Err(Error::ConeNotPointed);
    }
    Ok((basis, rest))
}

/// Columns of `A⁻¹` scaled to primitive integer vectors, for square invertible `A`.
fn simplicial_rays(a: &[Functional]) -> Result<Vec<Vec<i128>>> {
    let d = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|x| Rational::from_integer(*x)).collect();
            r.extend((0..d).map(|j| Rational::from_integer(i128::from(i == j))));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| m[r][c] != Rational::from_integer(0)).ok_or(Error::ConeNotPointed)?;
        m.swap(c, p);
        let pv = m[c][c];
        m[c].iter_mut().for_each(|x| *x /= pv);
        for r in 0..d {
            if r != c && m[r][c] != Rational::from_integer(0) {
                let f = m[r][c];
                for k in 0..2 * d {
                    let t = m[c][k];
                    m[r][k] -= f * t;
                }
            }
        }
    }
    Ok((0..d)
        .map(|j| {
            let col: Vec<Rational> = (0..d).map(|i| m[i][d + j]).collect();
            crate::exact::primitive_integer_ray(&col)
        })
        .collect())
}
