//! Isometry and signed-permutation equivalence of quadratic forms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::One;

use super::enumerate::{min_distance, shortest_vectors};
use super::form::{QuadraticForm, UnimodularMatrix};
use crate::error::Result;
use crate::exact::Rational;
use crate::reduction::minkowski_reduce;

/// Certificate that `G₁ = c · Zᵀ G₂ Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryWitness {
    pub scale: Rational,
    pub map: UnimodularMatrix,
}

impl IsometryWitness {
    /// Re-checks the witness in exact arithmetic.
    pub fn verify(&self, g1: &QuadraticForm, g2: &QuadraticForm) -> bool {
        g1.dim() == g2.dim()
            && g1.dim() == self.map.dim()
            && g2.transform(&self.map).scaled(self.scale).is_ok_and(|t| &t == g1)
    }
}

/// Searches for a unimodular `Z` and `c > 0` with `G₁ = c · Zᵀ G₂ Z`.
///
/// Both forms are Minkowski-reduced and scaled to minimum 1 first; the search then
/// assigns images to the basis vectors one at a time, drawing candidates of the right
/// form value (ordered by value, then lexicographically) and pruning on inner products.
/// `Ok(None)` means the forms are not isometric.
pub fn is_isometric(g1: &QuadraticForm, g2: &QuadraticForm) -> Result<Option<IsometryWitness>> {
    if g1.dim() != g2.dim() {
        return Ok(None);
    }
    let lambda1 = min_distance(g1)?.form_min;
    let lambda2 = min_distance(g2)?.form_min;
    let (l1, z1) = minkowski_reduce(g1)?;
    let (l2, z2) = minkowski_reduce(g2)?;
    let t = l1.scaled(Rational::one() / lambda1)?;
    let s = l2.scaled(Rational::one() / lambda2)?;
    if t.det() != s.det() {
        return Ok(None);
    }
    let Some(w) = basis_image_search(&t, &s)? else {
        return Ok(None);
    };
    // g1 = z1ᵀ l1 z1, l1 = c wᵀ l2 w, l2 = z2⁻ᵀ g2 z2⁻¹
    let map = z2.inverse()?.mul(&w)?.mul(&z1)?;
    let witness = IsometryWitness { scale: lambda1 / lambda2, map };
    debug_assert!(witness.verify(g1, g2));
    Ok(witness.verify(g1, g2).then_some(witness))
}

/// Finds an integer `W` with `target = Wᵀ source W`, given `det(target) = det(source)`.
fn basis_image_search(target: &QuadraticForm, source: &QuadraticForm) -> Result<Option<UnimodularMatrix>> {
    let n = target.dim();
    let diag = target.diagonal_entries();
    let max_diag = *diag.iter().max().expect("dim >= 1");
    let mut by_value: BTreeMap<Rational, Vec<Vec<i64>>> = BTreeMap::new();
    for (x, v) in shortest_vectors(source, &max_diag)? {
        let neg: Vec<i64> = x.iter().map(|c| -c).collect();
        let bucket = by_value.entry(v).or_default();
        bucket.push(x);
        bucket.push(neg);
    }
    let empty = Vec::new();
    let candidates: Vec<&Vec<Vec<i64>>> = diag.iter().map(|d| by_value.get(d).unwrap_or(&empty)).collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    if assign(0, target, source, &candidates, &mut chosen) {
        // the Gram of the chosen columns equals `target`, so the determinant is ±1
        return Ok(UnimodularMatrix::from_columns(&chosen).ok());
    }
    Ok(None)
}

fn assign(
    i: usize,
    target: &QuadraticForm,
    source: &QuadraticForm,
    candidates: &[&Vec<Vec<i64>>],
    chosen: &mut Vec<Vec<i64>>,
) -> bool {
    if i == target.dim() {
        return true;
    }
    'next: for cand in candidates[i].iter() {
        for (j, prev) in chosen.iter().enumerate() {
            if source.inner(cand, prev) != target.get(j, i) {
                continue 'next;
            }
        }
        chosen.push(cand.clone());
        if assign(i + 1, target, source, candidates, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Canonical representative of the signed-permutation class of `g`: the lexicographically
/// smallest packed sequence (diagonal ascending, then off-diagonal entries row by row)
/// over all `Πᵀ G Π` with `Π` a signed permutation.
pub fn signed_permutation_key(g: &QuadraticForm) -> Vec<Rational> {
    let n = g.dim();
    let diag = g.diagonal_entries();
    let mut sorted_diag = diag.clone();
    sorted_diag.sort();

    let mut best: Option<Vec<Rational>> = None;
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    visit_sorted_perms(&diag, &sorted_diag, &mut perm, &mut used, &mut |p| {
        for mask in 0u32..(1u32 << (n.saturating_sub(1))) {
            let sign = |k: usize| if k == 0 || mask & (1 << (k - 1)) == 0 { 1 } else { -1 };
            let mut off = Vec::with_capacity(n * (n - 1) / 2);
            let mut ord = if best.is_some() { Ordering::Equal } else { Ordering::Less };
            for i in 0..n {
                for j in i + 1..n {
                    let v = g.get(p[i], p[j]) * Rational::from_integer(sign(i) * sign(j));
                    if ord == Ordering::Equal {
                        let b = &best.as_ref().expect("set")[n + off.len()];
                        ord = v.cmp(b);
                        if ord == Ordering::Greater {
                            break;
                        }
                    }
                    off.push(v);
                }
                if ord == Ordering::Greater {
                    break;
                }
            }
            if ord == Ordering::Less {
                let mut key = sorted_diag.clone();
                key.extend(off);
                best = Some(key);
            }
        }
    });
    best.expect("at least one permutation sorts the diagonal")
}

fn visit_sorted_perms(
    diag: &[Rational],
    sorted_diag: &[Rational],
    perm: &mut Vec<usize>,
    used: &mut [bool],
    f: &mut impl FnMut(&[usize]),
) {
    let k = perm.len();
    if k == diag.len() {
        f(perm);
        return;
    }
    for i in 0..diag.len() {
        if !used[i] && diag[i] == sorted_diag[k] {
            used[i] = true;
            perm.push(i);
            visit_sorted_perms(diag, sorted_diag, perm, used, f);
            perm.pop();
            used[i] = false;
        }
    }
}

/// True iff `G₁ = Πᵀ G₂ Π` for some signed permutation matrix `Π`.
pub fn permutation_equivalent(g1: &QuadraticForm, g2: &QuadraticForm) -> bool {
    if g1.dim() != g2.dim() {
        return false;
    }
    let (mut d1, mut d2) = (g1.diagonal_entries(), g2.diagonal_entries());
    d1.sort();
    d2.sort();
    d1 == d2 && signed_permutation_key(g1) == signed_permutation_key(g2)
}
