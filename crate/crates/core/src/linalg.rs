//! Small dense complex linear-algebra helpers shared by the measure modules.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::complex_gaussian;

pub type CMatrix = DMatrix<Complex64>;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues below this are treated as exact zeros when forming matrix
/// square roots and factorizations. Rounding dust from an exactly
/// rank-deficient matrix sits near 1e-16; its square root would otherwise
/// leak ~1e-8 into every spectral quantity.
pub const RANK_EPS: f64 = 1e-13;

/// Largest elementwise |a - b|.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest elementwise |M - M^H|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// Eigenvectors are the columns of the returned matrix, in the same order.
pub fn eigh_desc(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0).ok_or(Error::EigenSolver)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Factor `W` with `m = W W^H`, keeping only eigen-directions above
/// [`RANK_EPS`]. Columns are `sqrt(mu_j) e_j` in descending order of `mu_j`.
pub fn psd_factor(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = eigh_desc(m)?;
    let rank = values.iter().take_while(|&&v| v > RANK_EPS).count();
    Ok(CMatrix::from_fn(m.nrows(), rank, |i, j| {
        vectors[(i, j)] * values[j].sqrt()
    }))
}

/// Closed-form determinant of a 2x2 Hermitian matrix. The imaginary part of
/// `ad - bc` vanishes for Hermitian input and is discarded.
pub fn det2_hermitian(m: &CMatrix) -> f64 {
    debug_assert_eq!(m.shape(), (2, 2));
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn mat2_to_dynamic(m: &Matrix2<Complex64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Modified Gram-Schmidt on the columns of `m`, in place. Returns `false` if
/// a column collapses (linearly dependent input).
pub fn orthonormalize_columns(m: &mut CMatrix) -> bool {
    let cols = m.ncols();
    for j in 0..cols {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let qk = m.column(k).clone_owned();
            m.column_mut(j).axpy(-proj, &qk, C1);
        }
        let norm = m.column(j).norm();
        if norm < 1e-12 {
            return false;
        }
        m.column_mut(j).unscale_mut(norm);
    }
    true
}

/// Largest elementwise |V^H V - I|.
pub fn isometry_defect(v: &CMatrix) -> f64 {
    let gram = v.adjoint() * v;
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { C1 } else { C0 };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// Haar-distributed `rows x cols` isometry (orthonormalized complex Ginibre).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let mut m = CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng));
        if orthonormalize_columns(&mut m) {
            return m;
        }
    }
}

/// Haar-distributed unitary of dimension `dim`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    random_isometry(dim, dim, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn eigh_sorts_descending() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.2, 0.0),
        ]));
        let (vals, vecs) = eigh_desc(&m).unwrap();
        assert_eq!(vals, vec![0.7, 0.2, 0.1]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factor_reconstructs_and_drops_null_space() {
        let mut rng = stream(1, 0);
        let g = CMatrix::from_fn(4, 2, |_, _| complex_gaussian(&mut rng));
        let m = &g * g.adjoint();
        let w = psd_factor(&m).unwrap();
        assert_eq!(w.ncols(), 2);
        assert!(max_abs_diff(&(&w * w.adjoint()), &m) < 1e-12);
    }

    #[test]
    fn random_isometry_is_orthonormal() {
        let mut rng = stream(2, 0);
        let v = random_isometry(8, 3, &mut rng);
        assert!(isometry_defect(&v) < 1e-13);
        let u = random_unitary(4, &mut rng);
        assert!(isometry_defect(&u) < 1e-13);
        assert!(isometry_defect(&u.adjoint()) < 1e-13);
    }

    #[test]
    fn kron_of_identities() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));
    }
}
