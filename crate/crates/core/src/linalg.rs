//! Small dense floating-point kernels: cyclic Jacobi eigensolver, Cholesky, orthogonality checks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = Q diag(values) Qᵀ` of a symmetric matrix, values sorted descending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi rotation sweeps until the off-diagonal Frobenius norm drops below
/// `1e-12` relative to the full norm.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimError { expected: n, got: a.ncols() });
    }
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);

    let off = |m: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > JACOBI_TOL * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalError("Jacobi iteration did not converge".into()));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Upper-triangular `R` with `Rᵀ R = A`; `None` if `A` is not (numerically) positive definite.
pub fn cholesky_upper(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut r = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut d = a[(i, i)];
        for k in 0..i {
            d -= r[(k, i)] * r[(k, i)];
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let rii = d.sqrt();
        r[(i, i)] = rii;
        for j in i + 1..n {
            let mut s = a[(i, j)];
            for k in 0..i {
                s -= r[(k, i)] * r[(k, j)];
            }
            r[(i, j)] = s / rii;
        }
    }
    Some(r)
}

/// Max-abs entry of `QᵀQ − I`.
pub fn orthogonality_residual(q: &DMatrix<f64>) -> f64 {
    let n = q.ncols();
    let p = q.transpose() * q;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_on_hexagonal_gram() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]);
        let e = jacobi_eigen(&g).unwrap();
        assert!((e.values[0] - 1.5).abs() < 1e-14);
        assert!((e.values[1] - 0.5).abs() < 1e-14);
        let back = &e.vectors * DMatrix::from_diagonal(&e.values.clone().into()) * e.vectors.transpose();
        assert!(max_abs_diff(&back, &g) < 1e-13);
        assert!(orthogonality_residual(&e.vectors) < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let n = 5;
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 3.0 - 1.0);
        let s = &a + a.transpose();
        let e = jacobi_eigen(&s).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let back = &e.vectors * DMatrix::from_diagonal(&e.values.clone().into()) * e.vectors.transpose();
        assert!(max_abs_diff(&back, &s) < 1e-10);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky_upper(&g).is_none());
        let r = cholesky_upper(&DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0])).unwrap();
        assert_eq!(r[(0, 0)], 2.0);
        assert_eq!(r[(1, 1)], 3.0);
    }
}
