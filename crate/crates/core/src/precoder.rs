//! Channel handling, the eigenvalue objective, and the optimal, geometric-mean and
//! reduced-basis precoder constructions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::One;

use crate::bounds::{lower_bound_energy, upper_bound_energy};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::lattice::{float_min_distance, min_distance, GeneratorMatrix, QuadraticForm};
use crate::linalg::{jacobi_eigen, orthogonality_residual};
use crate::reduction::factorize_ULZ;

/// Smallest accepted ratio between the smallest and largest singular value.
pub const MIN_SINGULAR_RATIO: f64 = 1e-10;

/// Positive channel singular values, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectrum {
    s: Vec<f64>,
}

impl ChannelSpectrum {
    /// Sorts the values descending; every value must be finite and positive.
    pub fn new(mut s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if let Some(bad) = s.iter().find(|x| !x.is_finite() || **x <= 0.0) {
            return Err(Error::InvalidSpectrum(format!("singular value {bad} is not positive")));
        }
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { s })
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn det(&self) -> f64 {
        self.s.iter().product()
    }

    /// `det(S)^{1/N}`, computed through logarithms.
    pub fn det_root(&self) -> f64 {
        (self.s.iter().map(|x| x.ln()).sum::<f64>() / self.s.len() as f64).exp()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.s.clone().into())
    }
}

/// A precoder together with its figures of merit.
#[derive(Debug, Clone)]
pub struct PrecoderResult {
    pub f: DMatrix<f64>,
    /// `tr(F Fᵀ)`.
    pub power: f64,
    /// Squared minimum distance of the received lattice `S F`.
    pub dmin2: f64,
    pub normalized_dmin2: f64,
    /// Gram matrix of the received lattice, when it came from an exact form.
    pub source_form: Option<QuadraticForm>,
    /// Lower and upper energy bounds at unit minimum distance.
    pub bounds: (f64, f64),
}

/// `[[Re A, Im A], [−Im A, Re A]]`.
pub fn realify_matrix(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (m, n) = a.shape();
    DMatrix::from_fn(2 * m, 2 * n, |i, j| {
        let z = a[(i % m, j % n)];
        match (i < m, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => z.im,
            (false, true) => -z.im,
        }
    })
}

/// `(Re x; Im x)`.
pub fn realify_vector(x: &[Complex64]) -> Vec<f64> {
    x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)).collect()
}

/// Inverse of [`realify_vector`].
pub fn complexify_vector(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

/// Singular values of a square channel, with `H = U diag(S) Vᵀ`.
pub fn spectrum_of(h: &DMatrix<f64>) -> Result<(ChannelSpectrum, DMatrix<f64>, DMatrix<f64>)> {
    let n = h.nrows();
    if n != h.ncols() || n == 0 {
        return Err(Error::DimError { expected: n, got: h.ncols() });
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("channel has non-finite entries".into()));
    }
    let svd = h.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let (hi, lo) = (s[0], s[n - 1]);
    if hi == 0.0 || lo < MIN_SINGULAR_RATIO * hi {
        return Err(Error::SingularChannel(if hi == 0.0 { 0.0 } else { lo / hi }));
    }
    let u = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    let v = DMatrix::from_fn(n, n, |i, j| v_t[(order[j], i)]);
    Ok((ChannelSpectrum::new(s)?, u, v))
}

/// `Σ_j ω_j(G) / s_j²` with both sequences descending: the least transmit power over all
/// rotations for a received lattice with Gram `G`.
pub fn objective(g: &QuadraticForm, s: &ChannelSpectrum) -> Result<f64> {
    objective_f64(g.as_f64(), s)
}

pub fn objective_f64(g: &DMatrix<f64>, s: &ChannelSpectrum) -> Result<f64> {
    if g.nrows() != s.dim() {
        return Err(Error::DimError { expected: s.dim(), got: g.nrows() });
    }
    let omega = jacobi_eigen(g)?.values;
    if omega.last().is_some_and(|w| *w <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(omega.iter().zip(s.values()).map(|(w, sj)| w / (sj * sj)).sum())
}

/// `F = S⁻¹ √D Qᵀ` for `G = Q D Qᵀ`, so that `(S F)ᵀ (S F) = G`.
pub fn build_precoder(g: &QuadraticForm, s: &ChannelSpectrum) -> Result<PrecoderResult> {
    let n = g.dim();
    if n != s.dim() {
        return Err(Error::DimError { expected: s.dim(), got: n });
    }
    let lambda = min_distance(g)?.form_min;
    let e = jacobi_eigen(g.as_f64())?;
    if e.values.iter().any(|w| *w <= 0.0) {
        return Err(Error::NumericalError("eigenvalue of a positive-definite form is not positive".into()));
    }
    let f = DMatrix::from_fn(n, n, |i, j| e.values[i].sqrt() * e.vectors[(j, i)] / s.values()[i]);
    let power = f.norm_squared();
    let dmin2 = to_f64(&lambda);
    let l = g.generator()?;
    let scale = if lambda.is_one() { 1.0 } else { dmin2 };
    let bounds = (lower_bound_energy(&l, s) / scale, upper_bound_energy(s));
    Ok(PrecoderResult { f, power, dmin2, normalized_dmin2: dmin2 / power, source_form: Some(g.clone()), bounds })
}

/// Output of [`gmd_precoder`]: `W · diag(S) · F = R` with `R` upper triangular and constant diagonal.
#[derive(Debug, Clone)]
pub struct GeometricMeanDecomposition {
    pub w: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

/// Geometric mean decomposition of `diag(S)` by paired plane rotations: at step `k` a
/// diagonal entry above the geometric mean and one below it are moved to positions `k` and
/// `k + 1`, and one rotation on each side sets position `k` to the mean.
pub fn gmd_precoder(s: &ChannelSpectrum) -> Result<GeometricMeanDecomposition> {
    let n = s.dim();
    let mean = s.det_root();
    let mut r = s.matrix();
    let mut w = DMatrix::<f64>::identity(n, n);
    let mut f = DMatrix::<f64>::identity(n, n);
    for k in 0..n.saturating_sub(1) {
        // trailing block is diagonal; bring a large entry to k and a small one to k+1
        let p = (k..n).max_by(|&a, &b| r[(a, a)].total_cmp(&r[(b, b)])).expect("k < n");
        swap_index(&mut r, &mut w, &mut f, k, p);
        let q = (k + 1..n).min_by(|&a, &b| r[(a, a)].total_cmp(&r[(b, b)])).expect("k + 1 < n");
        swap_index(&mut r, &mut w, &mut f, k + 1, q);
        let (d1, d2) = (r[(k, k)], r[(k + 1, k + 1)]);
        if d1 - d2 <= f64::EPSILON * d1 {
            continue;
        }
        let c = ((mean * mean - d2 * d2) / (d1 * d1 - d2 * d2)).clamp(0.0, 1.0).sqrt();
        let sn = (1.0 - c * c).sqrt();
        // right rotation [[c, −s], [s, c]] on columns k, k+1
        rotate_columns(&mut r, k, c, sn);
        rotate_columns(&mut f, k, c, sn);
        // left rotation (1/σ̄)[[c δ₁, s δ₂], [−s δ₂, c δ₁]] on rows k, k+1
        let (a, b) = (c * d1 / mean, sn * d2 / mean);
        rotate_rows(&mut r, k, a, b);
        rotate_rows(&mut w, k, a, b);
        r[(k + 1, k)] = 0.0;
    }
    let resid = orthogonality_residual(&w).max(orthogonality_residual(&f));
    if resid > 1e-10 {
        return Err(Error::OrthogonalityCheckFailed(resid));
    }
    Ok(GeometricMeanDecomposition { w, f, r })
}

fn swap_index(r: &mut DMatrix<f64>, w: &mut DMatrix<f64>, f: &mut DMatrix<f64>, i: usize, j: usize) {
    if i != j {
        r.swap_rows(i, j);
        r.swap_columns(i, j);
        w.swap_rows(i, j);
        f.swap_columns(i, j);
    }
}

fn rotate_columns(m: &mut DMatrix<f64>, k: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, k)], m[(i, k + 1)]);
        m[(i, k)] = c * x + s * y;
        m[(i, k + 1)] = -s * x + c * y;
    }
}

/// Rows `k, k+1` ← `[[a, b], [−b, a]] · rows`.
fn rotate_rows(m: &mut DMatrix<f64>, k: usize, a: f64, b: f64) {
    for j in 0..m.ncols() {
        let (x, y) = (m[(k, j)], m[(k + 1, j)]);
        m[(k, j)] = a * x + b * y;
        m[(k + 1, j)] = -b * x + a * y;
    }
}

/// Measures a precoder: received Gram `Fᵀ S² F`, its minimum distance, and the transmit power.
///
/// The minimum is found by floating-point sphere decoding on the received Gram matrix.
pub fn evaluate_precoder(f: &DMatrix<f64>, s: &ChannelSpectrum) -> Result<PrecoderResult> {
    let n = s.dim();
    if f.nrows() != n || f.ncols() != n {
        return Err(Error::DimError { expected: n, got: f.nrows() });
    }
    let b = GeneratorMatrix::new(s.matrix() * f)?;
    let g = b.matrix().transpose() * b.matrix();
    let dmin2 = float_min_distance(&g)?;
    let power = f.norm_squared();
    let bounds = (lower_bound_energy(&b, s) / dmin2, upper_bound_energy(s));
    Ok(PrecoderResult { f: f.clone(), power, dmin2, normalized_dmin2: dmin2 / power, source_form: None, bounds })
}

/// The geometric-mean precoder scaled to unit received minimum distance.
pub fn gmd_result(s: &ChannelSpectrum) -> Result<PrecoderResult> {
    let gmd = gmd_precoder(s)?;
    let raw = evaluate_precoder(&gmd.f, s)?;
    let f = &gmd.f / raw.dmin2.sqrt();
    evaluate_precoder(&f, s)
}

/// Reduced-basis improvement on the geometric-mean precoder: the GMD received basis is
/// factorized as `U L Z`, each candidate reduced form `G_m` replaces `Lᵀ L`, and the candidate
/// with the least optimal-rotation power for `Zᵀ G_m Z` wins (first in input order on ties).
pub fn suboptimal_precoder(s: &ChannelSpectrum, candidates: &[QuadraticForm]) -> Result<PrecoderResult> {
    if candidates.is_empty() {
        return Err(Error::Input("no candidate forms".into()));
    }
    let reference = gmd_result(s)?;
    let b = GeneratorMatrix::new(s.matrix() * &reference.f)?;
    let z = factorize_ULZ(&b)?.z;
    let mut best: Option<(f64, QuadraticForm)> = None;
    for g in candidates {
        if g.dim() != s.dim() {
            return Err(Error::DimError { expected: s.dim(), got: g.dim() });
        }
        let h = g.transform(&z);
        let p = objective(&h, s)?;
        if best.as_ref().is_none_or(|(bp, _)| p < *bp) {
            best = Some((p, h));
        }
    }
    let (_, h) = best.expect("candidates nonempty");
    build_precoder(&h, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::known::hexagonal;
    use crate::linalg::max_abs_diff;

    fn chan(v: &[f64]) -> ChannelSpectrum {
        ChannelSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn realify_examples() {
        let i = Complex64::new(0.0, 1.0);
        let a = DMatrix::from_element(1, 1, i);
        assert_eq!(realify_matrix(&a), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert_eq!(realify_matrix(&id), DMatrix::identity(4, 4));
        let a = DMatrix::from_element(1, 1, Complex64::new(1.0, 2.0));
        assert_eq!(realify_matrix(&a), DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -2.0, 1.0]));
        assert_eq!(realify_vector(&[i]), vec![0.0, 1.0]);
        let x = [Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)];
        assert_eq!(realify_vector(&x), vec![1.0, 2.0, 1.0, 0.0]);
        assert_eq!(complexify_vector(&realify_vector(&x)), x.to_vec());
    }

    #[test]
    fn spectrum_of_rotated_diagonal() {
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        let q1 = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let q2 = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let h = &q1 * DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]) * &q2;
        let (sp, u, v) = spectrum_of(&h).unwrap();
        assert!((sp.values()[0] - 3.0).abs() < 1e-12 && (sp.values()[1] - 2.0).abs() < 1e-12);
        assert!(max_abs_diff(&(&u * sp.matrix() * v.transpose()), &h) < 1e-9);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(spectrum_of(&singular), Err(Error::SingularChannel(_))));
    }

    #[test]
    fn objective_examples() {
        assert!((objective(&hexagonal(), &chan(&[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        let g = QuadraticForm::diagonal(&[crate::exact::int(4), crate::exact::int(1)]).unwrap();
        assert!((objective(&g, &chan(&[2.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_precoder_reproduces_form() {
        let s = chan(&[1.7, 1.1]);
        let res = build_precoder(&hexagonal(), &s).unwrap();
        let sf = s.matrix() * &res.f;
        assert!(max_abs_diff(&(sf.transpose() * &sf), hexagonal().as_f64()) < 1e-12);
        assert!((res.power - objective(&hexagonal(), &s).unwrap()).abs() < 1e-12);
        assert_eq!(res.dmin2, 1.0);

        let unit = build_precoder(&hexagonal(), &chan(&[1.0, 1.0])).unwrap();
        assert!((unit.power - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gmd_small_cases() {
        let d = gmd_precoder(&chan(&[4.0, 1.0])).unwrap();
        assert!((d.r[(0, 0)] - 2.0).abs() < 1e-12 && (d.r[(1, 1)] - 2.0).abs() < 1e-12);
        assert!(d.r[(1, 0)].abs() < 1e-15);
        let s = chan(&[4.0, 1.0]);
        assert!(max_abs_diff(&(&d.w * s.matrix() * &d.f), &d.r) < 1e-12);

        let s = chan(&[1.0, 0.95, 0.94, 0.93]);
        let d = gmd_precoder(&s).unwrap();
        for i in 0..4 {
            // fourth root of 0.83049 is 0.954627
            assert!((d.r[(i, i)] - 0.83049f64.powf(0.25)).abs() < 1e-12);
            for j in 0..i {
                assert!(d.r[(i, j)].abs() < 1e-12);
            }
        }
        assert!(max_abs_diff(&(&d.w * s.matrix() * &d.f), &d.r) < 1e-12);
    }

    #[test]
    fn evaluate_identity_and_gmd() {
        let r = evaluate_precoder(&DMatrix::identity(2, 2), &chan(&[1.0, 1.0])).unwrap();
        assert_eq!((r.dmin2, r.power, r.normalized_dmin2), (1.0, 2.0, 0.5));
        let s = chan(&[4.0, 1.0]);
        let d = gmd_precoder(&s).unwrap();
        let r = evaluate_precoder(&d.f, &s).unwrap();
        assert!(r.dmin2 >= 4.0 - 1e-9);
        for c in [0.5, 2.0, 10.0] {
            let rc = evaluate_precoder(&(&d.f * c), &s).unwrap();
            assert!((rc.normalized_dmin2 - r.normalized_dmin2).abs() < 1e-12 * r.normalized_dmin2);
        }
    }

    #[test]
    fn suboptimal_beats_gmd_on_unbalanced_channel() {
        let s = chan(&[2.0, 1.0]);
        let gmd = gmd_result(&s).unwrap();
        let sub = suboptimal_precoder(&s, &[hexagonal()]).unwrap();
        assert!(sub.power < gmd.power - 1e-9, "{} vs {}", sub.power, gmd.power);
        let s = chan(&[1.0, 1.0]);
        let sub = suboptimal_precoder(&s, &[hexagonal()]).unwrap();
        assert!(sub.power <= 2.0 + 1e-9);
    }
}
