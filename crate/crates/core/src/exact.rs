//! Exact scalar and integer-matrix helpers shared by the lattice routines.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for every form entry.
pub type Rational = Ratio<i128>;

/// Largest denominator used when a floating-point Gram entry is turned into a rational.
pub const MAX_DENOMINATOR: i128 = 1_000_000;

/// Denominators up to this size are tried first when snapping a float to a rational.
const SMALL_DENOMINATOR: i128 = 12;

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents plus the final semiconvergent).
pub fn rationalize(x: f64, max_den: i128) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::NumericalError(format!("cannot rationalize {x}")));
    }
    if x.abs() > 1e15 {
        return Err(Error::Overflow);
    }
    let negative = x < 0.0;
    let mut rem = x.abs();
    // convergents p/q
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    for _ in 0..64 {
        let a = rem.floor();
        let ai = a as i128;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            // largest semiconvergent that still fits
            let k = (max_den - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let semi = ps as f64 / qs as f64;
            let conv = p1 as f64 / q1 as f64;
            if (semi - x.abs()).abs() < (conv - x.abs()).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = ai * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rem - a;
        if frac < 1e-15 || (p1 as f64 / q1 as f64 - x.abs()).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        rem = 1.0 / frac;
    }
    let r = Rational::new(p1, q1);
    Ok(if negative { -r } else { r })
}

/// Snaps a floating-point matrix entry to a rational with denominator at most
/// `MAX_DENOMINATOR`: small-denominator fractions (halves, thirds, ...) are recovered exactly
/// when within `1e-9` relative, everything else is rounded to the `1/MAX_DENOMINATOR` grid.
/// Entries of one matrix therefore share a small common denominator.
pub fn snap(x: f64) -> Result<Rational> {
    let small = rationalize(x, SMALL_DENOMINATOR)?;
    if (to_f64(&small) - x).abs() <= 1e-9 * x.abs().max(1.0) {
        return Ok(small);
    }
    if !x.is_finite() || x.abs() > 1e15 {
        return Err(Error::Overflow);
    }
    Ok(Rational::new((x * MAX_DENOMINATOR as f64).round() as i128, MAX_DENOMINATOR))
}

/// Least common multiple of the denominators, with overflow detection.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Result<i128> {
    let mut l = 1i128;
    for x in xs {
        let d = *x.denom();
        let g = l.gcd(&d);
        l = (l / g).checked_mul(d).ok_or(Error::Overflow)?;
    }
    Ok(l)
}

/// Exact determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det_i128(m: &[Vec<i128>]) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or(Error::Overflow)?;
                a[i][j] = v / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Exact rank of a list of integer row vectors.
pub fn rank_i128(rows: &[Vec<i128>]) -> Result<usize> {
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let Some(cols) = a.first().map(Vec::len) else {
        return Ok(0);
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            if a[r][c] == 0 {
                continue;
            }
            let (pv, rv) = (a[rank][c], a[r][c]);
            for j in c..cols {
                a[r][j] = a[r][j]
                    .checked_mul(pv)
                    .and_then(|x| a[rank][j].checked_mul(rv).and_then(|y| x.checked_sub(y)))
                    .ok_or(Error::Overflow)?;
            }
            normalize_primitive(&mut a[r]);
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    Ok(rank)
}

/// Divides an integer vector by the gcd of its entries; returns the gcd.
pub fn normalize_primitive(v: &mut [i128]) -> i128 {
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    g
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer_ray(v: &[Rational]) -> Vec<i128> {
    let lcm = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
    let mut out: Vec<i128> = v.iter().map(|x| (x * lcm).to_integer()).collect();
    normalize_primitive(&mut out);
    out
}

pub fn is_zero_vec(v: &[i64]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Canonical sign for a ±pair: first nonzero coordinate positive.
pub fn canonical_sign(v: &mut [i64]) {
    if let Some(first) = v.iter().find(|x| **x != 0) {
        if first.is_negative() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn is_canonical_sign(v: &[i64]) -> bool {
    v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0)
}
