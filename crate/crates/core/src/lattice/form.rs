use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{common_denominator, det_i128, snap, to_f64, Rational};
use crate::linalg::cholesky_upper;

/// Index of entry `(i, j)` (`i <= j`) in packed upper-triangle order.
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// A symmetric positive-definite Gram matrix with exact rational entries.
///
/// Entries are stored packed as the upper triangle `g11, g12, …, g1N, g22, …, gNN`.
/// An integer numerator matrix over a common denominator and a floating-point mirror
/// are kept alongside for fast evaluation.
#[derive(Clone)]
pub struct QuadraticForm {
    dim: usize,
    entries: Vec<Rational>,
    numer: Vec<i128>,
    denom: i128,
    float: DMatrix<f64>,
}

impl PartialEq for QuadraticForm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl Eq for QuadraticForm {}

impl Hash for QuadraticForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl QuadraticForm {
    /// Builds a form from packed upper-triangle entries, checking positive definiteness exactly.
    pub fn from_packed(dim: usize, entries: Vec<Rational>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if entries.len() != packed_len(dim) {
            return Err(Error::DimError { expected: packed_len(dim), got: entries.len() });
        }
        let form = Self::build(dim, entries)?;
        if !form.leading_minors_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(form)
    }

    fn build(dim: usize, entries: Vec<Rational>) -> Result<Self> {
        let denom = common_denominator(&entries)?;
        let mut numer = vec![0i128; dim * dim];
        let mut float = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let e = &entries[packed_index(dim, i, j)];
                let v = e.numer().checked_mul(denom / e.denom()).ok_or(Error::Overflow)?;
                numer[i * dim + j] = v;
                numer[j * dim + i] = v;
                let f = to_f64(e);
                float[(i, j)] = f;
                float[(j, i)] = f;
            }
        }
        Ok(Self { dim, entries, numer, denom, float })
    }

    /// Builds a form from a full symmetric matrix given row by row.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        let mut packed = Vec::with_capacity(packed_len(n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimError { expected: n, got: row.len() });
            }
            for j in i..n {
                if rows[j][i] != row[j] {
                    return Err(Error::Input(format!("matrix is not symmetric at ({i}, {j})")));
                }
                packed.push(row[j]);
            }
        }
        Self::from_packed(n, packed)
    }

    /// Builds a form from floating-point rows, snapping each entry to a rational
    /// (see [`crate::exact::snap`]).
    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut packed = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            if rows[i].len() != n {
                return Err(Error::DimError { expected: n, got: rows[i].len() });
            }
            for j in i..n {
                let avg = 0.5 * (rows[i][j] + rows[j][i]);
                packed.push(snap(avg)?);
            }
        }
        Self::from_packed(n, packed)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Rational::one(); n]).expect("identity is positive definite")
    }

    pub fn diagonal(d: &[Rational]) -> Result<Self> {
        let n = d.len();
        let mut packed = vec![Rational::zero(); packed_len(n)];
        for (i, v) in d.iter().enumerate() {
            packed[packed_index(n, i, i)] = *v;
        }
        Self::from_packed(n, packed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries[packed_index(self.dim, i, j)]
    }

    pub fn packed(&self) -> &[Rational] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Floating-point mirror of the matrix.
    pub fn as_f64(&self) -> &DMatrix<f64> {
        &self.float
    }

    pub fn trace(&self) -> Rational {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal_entries(&self) -> Vec<Rational> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Pivots of the exact LDLᵀ elimination (no pivoting).
    fn ldl_pivots(&self) -> Vec<Rational> {
        let n = self.dim;
        let mut a = self.to_rows();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let p = a[k][k];
            pivots.push(p);
            if p.is_zero() {
                break;
            }
            for i in k + 1..n {
                let f = a[i][k] / p;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k][j];
                    a[i][j] -= f * t;
                }
            }
        }
        pivots
    }

    fn leading_minors_positive(&self) -> bool {
        let pivots = self.ldl_pivots();
        pivots.len() == self.dim && pivots.iter().all(|p| p.is_positive())
    }

    /// Exact determinant.
    pub fn det(&self) -> Rational {
        self.ldl_pivots().iter().product()
    }

    /// `xᵀ G x`, exact.
    pub fn eval(&self, x: &[i64]) -> Result<Rational> {
        if x.len() != self.dim {
            return Err(Error::DimError { expected: self.dim, got: x.len() });
        }
        Ok(Rational::new(self.eval_numer(x), self.denom))
    }

    /// Numerator of `xᵀ G x` over the common denominator `self.denom()`.
    pub(crate) fn eval_numer(&self, x: &[i64]) -> i128 {
        let n = self.dim;
        let mut total = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            let row = &self.numer[i * n..(i + 1) * n];
            let mut acc = row[i] * xi;
            for j in i + 1..n {
                acc += 2 * row[j] * x[j] as i128;
            }
            total += acc * xi;
        }
        total
    }

    pub(crate) fn denom(&self) -> i128 {
        self.denom
    }

    /// `xᵀ G y`, exact.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> Rational {
        Rational::new(self.inner_numer(x, y), self.denom)
    }

    pub(crate) fn inner_numer(&self, x: &[i64], y: &[i64]) -> i128 {
        let n = self.dim;
        let mut total = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let row = &self.numer[i * n..(i + 1) * n];
            let acc: i128 = row.iter().zip(y).map(|(g, yj)| g * *yj as i128).sum();
            total += acc * x[i] as i128;
        }
        total
    }

    /// `c · G` for a positive rational `c`.
    pub fn scaled(&self, c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Input("scale factor must be positive".into()));
        }
        Self::build(self.dim, self.entries.iter().map(|e| e * c).collect())
    }

    /// `Mᵀ G M` for an integer matrix given by its columns. The result must be positive
    /// definite, i.e. `M` non-singular.
    pub fn congruent(&self, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.len() != self.dim || columns.iter().any(|c| c.len() != self.dim) {
            return Err(Error::DimError { expected: self.dim, got: columns.len() });
        }
        let n = self.dim;
        let mut packed = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in i..n {
                packed.push(self.inner(&columns[i], &columns[j]));
            }
        }
        Self::from_packed(n, packed)
    }

    /// `Zᵀ G Z`.
    pub fn transform(&self, z: &UnimodularMatrix) -> Self {
        self.congruent(&z.columns()).expect("unimodular congruence preserves definiteness")
    }

    /// Float mirror as a plain `Vec` of packed entries.
    pub fn packed_f64(&self) -> Vec<f64> {
        self.entries.iter().map(to_f64).collect()
    }

    /// Gram matrix of a generator: `Bᵀ B`, rationalized entrywise.
    pub fn gram_of(b: &GeneratorMatrix) -> Result<Self> {
        let g = b.matrix().transpose() * b.matrix();
        let rows: Vec<Vec<f64>> = (0..g.nrows()).map(|i| (0..g.ncols()).map(|j| g[(i, j)]).collect()).collect();
        Self::from_f64_rows(&rows).map_err(|e| match e {
            Error::NotPositiveDefinite => Error::DegenerateBasis(b.matrix().determinant().abs()),
            other => other,
        })
    }

    /// Upper-triangular Cholesky factor `L` with `Lᵀ L = G`.
    pub fn generator(&self) -> Result<GeneratorMatrix> {
        let r = cholesky_upper(&self.float).ok_or(Error::NotPositiveDefinite)?;
        GeneratorMatrix::new(r)
    }
}

/// Real non-singular N×N lattice basis; columns are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    m: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimError { expected: m.nrows(), got: m.ncols() });
        }
        let det = m.determinant();
        let scale: f64 = m.column_iter().map(|c| c.norm()).product();
        if !det.is_finite() || det.abs() < 1e-12 * scale || scale == 0.0 {
            return Err(Error::DegenerateBasis(det.abs()));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("generator must be square".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Fundamental volume `|det B|`.
    pub fn volume(&self) -> f64 {
        self.m.determinant().abs()
    }

    pub fn gram(&self) -> Result<QuadraticForm> {
        QuadraticForm::gram_of(self)
    }
}

/// Integer N×N matrix with determinant ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodularMatrix {
    n: usize,
    // row-major
    entries: Vec<i64>,
}

impl UnimodularMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("unimodular matrix must be square".into()));
        }
        let entries: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(n, entries)
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let n = cols.len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Input("unimodular matrix must be square".into()));
        }
        let entries = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
        Self::from_row_major(n, entries)
    }

    fn from_row_major(n: usize, entries: Vec<i64>) -> Result<Self> {
        let z = Self { n, entries };
        let d = z.det()?;
        if d.abs() != 1 {
            return Err(Error::NotUnimodular(d));
        }
        Ok(z)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j)).collect()).collect()
    }

    pub fn det(&self) -> Result<i128> {
        let rows: Vec<Vec<i128>> =
            self.entries.chunks(self.n).map(|r| r.iter().map(|x| *x as i128).collect()).collect();
        det_i128(&rows)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.n;
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i64;
                for k in 0..n {
                    s = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .and_then(|p| s.checked_add(p))
                        .ok_or(Error::Overflow)?;
                }
                entries[i * n + j] = s;
            }
        }
        Ok(Self { n, entries })
    }

    /// Exact inverse (also unimodular).
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = (0..n).map(|j| Rational::from_integer(self.get(i, j) as i128)).collect();
                row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::NotUnimodular(0))?;
            a.swap(c, p);
            let pv = a[c][c];
            a[c].iter_mut().for_each(|x| *x /= pv);
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c];
                    for k in 0..2 * n {
                        let t = a[c][k];
                        a[r][k] -= f * t;
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &a {
            for x in &row[n..] {
                if !x.is_integer() {
                    return Err(Error::NotUnimodular(0));
                }
                entries.push(i64::try_from(x.to_integer()).map_err(|_| Error::Overflow)?);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.get(j, i)).collect();
        Self { n, entries }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// `tr(Z Zᵀ)`, the sum of squared entries.
    pub fn frobenius_sq(&self) -> i64 {
        self.entries.iter().map(|x| x * x).sum()
    }
}
