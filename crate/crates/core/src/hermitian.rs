//! Small dense complex-Hermitian helpers shared by the SINR forms and the SDP solver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::channel::CVector;

pub type CMatrix = DMatrix<Complex64>;

/// `x xᴴ`.
pub fn outer(x: &CVector) -> CMatrix {
    x * x.adjoint()
}

/// Real inner product `Re tr(A B)` of two Hermitian matrices.
pub fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

/// `tr(A B)` without assuming either argument Hermitian.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

/// `xᴴ A x`, real part.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Symmetrizes in place: `A <- (A + Aᴴ) / 2`.
pub fn symmetrize(a: &mut CMatrix) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
}

/// Lower Cholesky factor of a Hermitian positive definite matrix, `None`
/// if `a` is not numerically positive definite.
///
/// Hand-rolled: nalgebra's complex factorization takes complex square roots
/// of the pivots and so never reports indefiniteness.
pub fn cholesky_lower(a: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let mut l = a.clone();
    for j in 0..n {
        let mut d = l[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0 && d.is_finite()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for k in 0..j {
            let ljk = l[(j, k)].conj();
            if ljk == zero {
                continue;
            }
            for i in (j + 1)..n {
                let lik = l[(i, k)];
                l[(i, j)] -= lik * ljk;
            }
        }
        let inv = 1.0 / djj;
        for i in (j + 1)..n {
            l[(i, j)] *= inv;
        }
        for i in 0..j {
            l[(i, j)] = zero;
        }
    }
    Some(l)
}

/// `ln det L Lᴴ` from a Cholesky factor.
pub fn log_det_from_cholesky(l: &CMatrix) -> f64 {
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>()
}

/// `ln det A` when `A` is Hermitian positive definite, `None` otherwise.
pub fn log_det_pd(a: &CMatrix) -> Option<f64> {
    cholesky_lower(a).map(|l| log_det_from_cholesky(&l))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

pub fn eigh(a: &CMatrix) -> HermitianEigen {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    *eigh(a).values.last().expect("non-empty matrix")
}
