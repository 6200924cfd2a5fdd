//! Perfect forms: the vertices of the Ryshkov polyhedron and the neighbour traversal that
//! enumerates them below a trace bound.

mod cone;

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

pub use cone::{evaluation_functional, extreme_rays, minimal_cone_inequalities, Functional, RayDirection};

use crate::error::{Error, Result};
use crate::exact::{rank_i128, ratio, Rational};
use crate::lattice::{
    is_isometric, min_distance, packed_index, packed_len, shortest_vectors, signed_permutation_key, MinVecSet,
    QuadraticForm,
};

/// Doublings of the step length tried before a ray is declared unbounded.
const MAX_DOUBLINGS: usize = 64;

/// A perfect form at minimum 1 together with its minimal vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectFormRecord {
    pub form: QuadraticForm,
    pub min_vectors: MinVecSet,
    pub visited: bool,
    pub trace: Rational,
}

/// The root lattice `A_N`: ones on the diagonal, `−1/2` on the first off-diagonals.
pub fn root_lattice_form(n: usize) -> Result<QuadraticForm> {
    if n < 2 {
        return Err(Error::DimError { expected: 2, got: n });
    }
    let mut packed = vec![Rational::zero(); packed_len(n)];
    for i in 0..n {
        packed[packed_index(n, i, i)] = Rational::one();
        if i + 1 < n {
            packed[packed_index(n, i, i + 1)] = ratio(-1, 2);
        }
    }
    QuadraticForm::from_packed(n, packed)
}

/// True iff the outer products of the minimal vectors span the whole space of symmetric matrices.
pub fn is_perfect(g: &QuadraticForm) -> Result<bool> {
    let mv = min_distance(g)?;
    Ok(rank_i128(&minimal_cone_inequalities(&mv))? == packed_len(g.dim()))
}

/// Minimal vectors of a form known to have minimum 1.
fn unit_min_vectors(g: &QuadraticForm) -> Result<MinVecSet> {
    let found = shortest_vectors(g, &Rational::one())?;
    let mut vectors: Vec<Vec<i64>> = found.into_iter().filter(|(_, v)| v.is_one()).map(|(x, _)| x).collect();
    vectors.sort();
    Ok(MinVecSet { form_min: Rational::one(), vectors })
}

fn shifted(g: &QuadraticForm, t: &[Rational], u: Rational) -> Result<QuadraticForm> {
    let packed = g.packed().iter().zip(t).map(|(a, b)| a + b * u).collect();
    QuadraticForm::from_packed(g.dim(), packed)
}

/// Vectors with `H[x] < 1`, or `None` when `H` is not positive definite.
fn below_one(h: &Result<QuadraticForm>) -> Result<Option<Vec<Vec<i64>>>> {
    let h = match h {
        Ok(h) => h,
        Err(Error::NotPositiveDefinite) => return Ok(None),
        Err(e) => return Err(e.clone()),
    };
    match shortest_vectors(h, &Rational::one()) {
        Ok(found) => Ok(Some(found.into_iter().filter(|(_, v)| *v < Rational::one()).map(|(x, _)| x).collect())),
        Err(Error::NotPositiveDefinite) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The neighbouring perfect form `G + ρT` along an extreme ray `T` of the cone of `G`.
///
/// The step is bracketed first (halving while `G + uT` is indefinite, doubling while the
/// minimum has not dropped below 1), then shrunk to `min (1 − G[x]) / T[x]` over the vectors
/// that fall below 1 until no such vector remains.
pub fn neighbor_form(g: &QuadraticForm, t: &RayDirection) -> Result<QuadraticForm> {
    if t.dim != packed_len(g.dim()) {
        return Err(Error::DimError { expected: packed_len(g.dim()), got: t.dim });
    }
    let dir = t.entries();
    let two = Rational::from_integer(2);
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    let mut doublings = 0;
    let mut candidates = loop {
        match below_one(&shifted(g, &dir, hi))? {
            None => hi = (lo + hi) / two,
            Some(xs) if xs.is_empty() => {
                doublings += 1;
                if doublings > MAX_DOUBLINGS {
                    return Err(Error::RayUnbounded);
                }
                lo = hi;
                hi *= two;
            }
            Some(xs) => break xs,
        }
    };
    loop {
        let mut best: Option<Rational> = None;
        for x in &candidates {
            let tx = t.eval(x);
            if tx >= 0 {
                continue;
            }
            let alpha = (Rational::one() - g.eval(x)?) / Rational::from_integer(tx);
            if best.is_none_or(|b| alpha < b) {
                best = Some(alpha);
            }
        }
        let rho = best.ok_or_else(|| Error::NumericalError("no vector constrains the step length".into()))?;
        if !rho.is_positive() {
            return Err(Error::NumericalError("non-positive step along an extreme ray".into()));
        }
        let h = shifted(g, &dir, rho);
        match below_one(&h)? {
            Some(xs) if xs.is_empty() => return h,
            Some(xs) => candidates = xs,
            None => return Err(Error::NumericalError(format!("step {rho} left the positive-definite cone"))),
        }
    }
}

/// Traversal options for [`enumerate_perfect_forms_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraversalOptions {
    /// Skip neighbours that equal a stored form up to a signed permutation.
    pub prune_permutations: bool,
}

impl Default for TraversalOptions {
    fn default() -> Self {
        Self { prune_permutations: true }
    }
}

/// Perfect forms reachable from `start` whose trace does not exceed `trace_bound`,
/// one per signed-permutation class, sorted by trace and then by packed entries.
pub fn enumerate_perfect_forms(start: &QuadraticForm, trace_bound: &Rational) -> Result<Vec<PerfectFormRecord>> {
    enumerate_perfect_forms_with(start, trace_bound, TraversalOptions::default())
}

pub fn enumerate_perfect_forms_with(
    start: &QuadraticForm,
    trace_bound: &Rational,
    options: TraversalOptions,
) -> Result<Vec<PerfectFormRecord>> {
    let start_min = unit_min_vectors(start)?;
    if min_distance(start)?.form_min != Rational::one() {
        return Err(Error::Input("start form must have minimum 1".into()));
    }
    if rank_i128(&minimal_cone_inequalities(&start_min))? != packed_len(start.dim()) {
        return Err(Error::Input("start form is not perfect".into()));
    }
    if start.trace() > *trace_bound {
        return Err(Error::Input(format!("start trace {} exceeds the bound {trace_bound}", start.trace())));
    }
    let key_of = |g: &QuadraticForm| {
        if options.prune_permutations {
            signed_permutation_key(g)
        } else {
            g.packed().to_vec()
        }
    };

    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut pending: BTreeMap<(Rational, Vec<Rational>), QuadraticForm> = BTreeMap::new();
    let mut done = Vec::new();
    seen.insert(key_of(start));
    pending.insert((start.trace(), start.packed().to_vec()), start.clone());

    while let Some(((trace, _), g)) = pending.pop_first() {
        let mv = unit_min_vectors(&g)?;
        let rays = extreme_rays(&minimal_cone_inequalities(&mv), packed_len(g.dim()))?;
        for ray in &rays {
            let h = match neighbor_form(&g, ray) {
                Ok(h) => h,
                Err(Error::RayUnbounded) => continue,
                Err(e) => return Err(e),
            };
            let t = h.trace();
            if t > *trace_bound {
                continue;
            }
            let key = key_of(&h);
            if seen.insert(key) {
                pending.insert((t, h.packed().to_vec()), h);
            }
        }
        done.push(PerfectFormRecord { form: g, min_vectors: mv, visited: true, trace });
    }
    done.sort_by(|a, b| a.trace.cmp(&b.trace).then_with(|| a.form.packed().cmp(b.form.packed())));
    Ok(done)
}

/// Groups forms into isometry classes; each class lists indices in input order.
pub fn isometry_classes(forms: &[QuadraticForm]) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut signature: Vec<(Rational, usize)> = Vec::new();
    for (i, g) in forms.iter().enumerate() {
        let mv = min_distance(g)?;
        let scaled_det = g.det() / pow(mv.form_min, g.dim());
        let sig = (scaled_det, mv.len());
        let mut placed = false;
        for (c, class) in classes.iter_mut().enumerate() {
            if signature[c] == sig && is_isometric(g, &forms[class[0]])?.is_some() {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
            signature.push(sig);
        }
    }
    Ok(classes)
}

fn pow(x: Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}
