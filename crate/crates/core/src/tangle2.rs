//! Two-qubit entanglement measures: the spin-flip spectrum, tangle,
//! concurrence, the pure-state bipartite tangle and entanglement of formation.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RANK_EPS};
use crate::qstate::{self, DensityMatrix, PureState, PSD_TOLERANCE};

/// Eigenvalues of a reduced state above this count toward its rank.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Square roots of the eigenvalues of `rho * spin_flip(rho)`, descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSpectrum {
    pub lambdas: [f64; 4],
}

impl LambdaSpectrum {
    /// `max(l1 - l2 - l3 - l4, 0)`
    pub fn concurrence(&self) -> f64 {
        let [l1, l2, l3, l4] = self.lambdas;
        (l1 - l2 - l3 - l4).max(0.0)
    }

    pub fn tangle(&self) -> f64 {
        self.concurrence().powi(2)
    }

    /// `sum l_i^2`, which equals `Tr(rho rho~)`.
    pub fn sum_of_squares(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum()
    }
}

fn spin_flip_matrix() -> CMatrix {
    let sy = linalg::mat2_to_dynamic(&qstate::sigma_y());
    linalg::kron(&sy, &sy)
}

/// Spectrum from a factor `W` (4 x r) with `rho = W W^H`.
///
/// The nonzero eigenvalues of `rho rho~` coincide with those of `T T^H`
/// where `T = W^T (Y x Y) W`, so the lambdas are the singular values of the
/// small symmetric matrix `T`. This is the Hermitian `sqrt(rho) rho~ sqrt(rho)`
/// route with the square root folded into the factor, and it keeps exact
/// zeros exact.
pub fn lambda_spectrum_from_factor(w: &CMatrix) -> Result<LambdaSpectrum> {
    if w.nrows() != 4 {
        return Err(Error::Dimension {
            rows: w.nrows(),
            cols: w.ncols(),
        });
    }
    let mut lambdas = [0.0; 4];
    if w.ncols() == 0 {
        return Ok(LambdaSpectrum { lambdas });
    }
    let t = w.transpose() * spin_flip_matrix() * w;
    let svd = t.try_svd(false, false, f64::EPSILON, 0).ok_or(Error::EigenSolver)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    for (slot, v) in lambdas.iter_mut().zip(sv) {
        *slot = v.max(0.0);
    }
    Ok(LambdaSpectrum { lambdas })
}

/// Descending lambdas for a two-qubit state.
pub fn lambda_spectrum(rho: &DensityMatrix) -> Result<LambdaSpectrum> {
    if rho.dim() != 4 {
        return Err(Error::QubitCount {
            got: rho.n(),
            expected: "2",
        });
    }
    let (values, vectors) = rho.eigen()?;
    let min = values[3];
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPsd(min));
    }
    let rank = values.iter().take_while(|&&v| v > RANK_EPS).count();
    let w = CMatrix::from_fn(4, rank, |i, j| vectors[(i, j)] * values[j].sqrt());
    lambda_spectrum_from_factor(&w)
}

/// Tangle `[max(l1 - l2 - l3 - l4, 0)]^2` of a two-qubit state.
pub fn tangle_mixed(rho: &DensityMatrix) -> Result<f64> {
    Ok(lambda_spectrum(rho)?.tangle())
}

/// Concurrence, the square root of the tangle.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(lambda_spectrum(rho)?.concurrence())
}

/// `Tr(rho rho~)` by direct matrix products.
pub fn flip_overlap(rho: &DensityMatrix) -> Result<f64> {
    let flipped = qstate::spin_flip(rho)?;
    Ok((rho.matrix() * flipped.matrix()).trace().re)
}

/// Tangle between `partition` and the remaining qubits of a pure state.
///
/// For a single-qubit side this is `4 det rho_side`. For larger sides the
/// reduced state must have rank at most 2, and the same quantity is
/// `4 l1 l2 = 2 (1 - Tr rho_side^2)`.
pub fn tangle_pure_bipartite(psi: &PureState, partition: &[usize]) -> Result<f64> {
    let n = psi.n();
    let mut inside = vec![false; n];
    for &q in partition {
        if q >= n || std::mem::replace(&mut inside[q], true) {
            return Err(Error::InvalidQubits(format!("bad partition {partition:?}")));
        }
    }
    let complement: Vec<usize> = (0..n).filter(|q| !inside[*q]).collect();
    if partition.is_empty() || complement.is_empty() {
        return Err(Error::InvalidQubits(format!(
            "partition {partition:?} is not a proper split"
        )));
    }
    let side = if partition.len() <= complement.len() {
        partition
    } else {
        &complement[..]
    };
    let reduced = psi.reduced(side)?;
    let tau = if side.len() == 1 {
        4.0 * linalg::det2_hermitian(reduced.matrix())
    } else {
        let (values, _) = reduced.eigen()?;
        if values.iter().filter(|&&v| v > RANK_TOLERANCE).count() > 2 {
            return Err(Error::TangleUndefined);
        }
        2.0 * (1.0 - reduced.purity())
    };
    Ok(tau.max(0.0))
}

/// Binary entropy in bits; `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation `h(1/2 + sqrt(1 - tau)/2)` for a two-qubit tangle.
pub fn eof_from_tangle(tau: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&tau) {
        return Err(Error::TangleOutOfRange(tau));
    }
    let tau = tau.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 + 0.5 * (1.0 - tau).sqrt()))
}
