//! Pure states and density matrices of a few qubits.
//!
//! Amplitude indices put the first qubit (label A) in the most significant
//! bit, so `|ijk>` lives at index `4i + 2j + k`.

mod io;

pub use io::StateFile;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C0};
use crate::rng::{self, complex_gaussian_vec};

pub const MAX_QUBITS: usize = 12;

/// Inputs whose norm is within this distance of 1 are silently renormalized.
pub const NORM_TOLERANCE: f64 = 1e-6;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Eigenvalues in `[-PSD_TOLERANCE, 0)` count as rounding noise.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Pauli `sigma_y` in the computational basis.
pub const SIGMA_Y: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
];

/// Antisymmetric tensor with `eps[0][1] = 1`, `eps[1][0] = -1`. Equal to
/// `i * sigma_y` entrywise.
pub const EPSILON: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

pub fn sigma_y() -> Matrix2<Complex64> {
    Matrix2::new(SIGMA_Y[0][0], SIGMA_Y[0][1], SIGMA_Y[1][0], SIGMA_Y[1][1])
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            got: n,
            expected: "1..=12",
        })
    }
}

/// Splits every basis index of an `n`-qubit register into (kept, traced)
/// sub-indices. `groups[r][a]` is the full index whose traced part is `r`
/// and whose kept part is `a`.
fn index_groups(n: usize, keep: &[usize]) -> Result<Vec<Vec<usize>>> {
    if keep.is_empty() {
        return Err(Error::InvalidQubits("keep set is empty".into()));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(Error::InvalidQubits(format!("qubit {q} out of range for {n} qubits")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::InvalidQubits(format!("qubit {q} listed twice")));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let kept_dim = 1usize << keep.len();
    let rest_dim = 1usize << rest.len();
    let mut groups = vec![vec![0usize; kept_dim]; rest_dim];
    for (r, group) in groups.iter_mut().enumerate() {
        let mut base = 0usize;
        for (pos, &q) in rest.iter().enumerate() {
            if r >> (rest.len() - 1 - pos) & 1 == 1 {
                base |= bit(q);
            }
        }
        for (a, slot) in group.iter_mut().enumerate() {
            let mut full = base;
            for (pos, &q) in keep.iter().enumerate() {
                if a >> (keep.len() - 1 - pos) & 1 == 1 {
                    full |= bit(q);
                }
            }
            *slot = full;
        }
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes. A norm within [`NORM_TOLERANCE`]
    /// of 1 is corrected; anything further off is rejected.
    pub fn from_amplitudes(amps: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::build(amps, n, false)
    }

    /// Like [`PureState::from_amplitudes`] but rescales any nonzero vector.
    pub fn normalized(amps: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::build(amps, n, true)
    }

    fn build(mut amps: Vec<Complex64>, n: usize, force: bool) -> Result<Self> {
        check_qubits(n)?;
        let expected = 1usize << n;
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                n,
                expected,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        if !force && (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOLERANCE,
            });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidQubits(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C0; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn ghz(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![C0; 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        amps[(1 << n) - 1] = Complex64::new(1.0, 0.0);
        Self::normalized(amps, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Reduced density matrix of the qubits in `keep` (in the given order),
    /// computed straight from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let groups = index_groups(self.n, keep)?;
        let d = 1usize << keep.len();
        let mut m = CMatrix::zeros(d, d);
        for group in &groups {
            for a in 0..d {
                let x = self.amps[group[a]];
                if x == C0 {
                    continue;
                }
                for b in 0..d {
                    m[(a, b)] += x * self.amps[group[b]].conj();
                }
            }
        }
        Ok(DensityMatrix { n: keep.len(), m })
    }

    /// Relabels qubits: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidQubits(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let mut amps = vec![C0; self.dim()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (q, &src) in perm.iter().enumerate() {
                if new_idx >> (n - 1 - q) & 1 == 1 {
                    old_idx |= 1 << (n - 1 - src);
                }
            }
            *slot = self.amps[old_idx];
        }
        Ok(Self { n, amps })
    }

    /// Applies the single-qubit operator `u` to qubit `q`.
    pub fn apply_single_qubit(&self, q: usize, u: &Matrix2<Complex64>) -> Result<Self> {
        if q >= self.n {
            return Err(Error::InvalidQubits(format!("qubit {q} out of range")));
        }
        let bit = 1usize << (self.n - 1 - q);
        let mut amps = self.amps.clone();
        for i0 in (0..self.dim()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (x0, x1) = (self.amps[i0], self.amps[i1]);
            amps[i0] = u[(0, 0)] * x0 + u[(0, 1)] * x1;
            amps[i1] = u[(1, 0)] * x0 + u[(1, 1)] * x1;
        }
        Ok(Self { n: self.n, amps })
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || !rows.is_power_of_two() || rows < 2 {
            return Err(Error::Dimension { rows, cols });
        }
        let n = rows.trailing_zeros() as usize;
        check_qubits(n)?;
        let defect = linalg::hermitian_defect(&m);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::NotUnitTrace(tr));
        }
        let (vals, _) = linalg::eigh_desc(&m)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -PSD_TOLERANCE {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { n, m })
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = &psi.amps;
        let d = v.len();
        let m = CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj());
        Self { n: psi.n, m }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let d = 1usize << n;
        Ok(Self {
            n,
            m: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    /// Convex combination `sum p_k rho_k`.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidConfig("empty mixture".into()))?;
        let n = first.1.n;
        let mut total = 0.0;
        let mut m = CMatrix::zeros(first.1.dim(), first.1.dim());
        for (p, rho) in parts {
            if rho.n != n {
                return Err(Error::InvalidQubits("mixture of different qubit counts".into()));
            }
            if *p < 0.0 {
                return Err(Error::InvalidConfig(format!("negative weight {p}")));
            }
            total += p;
            m += rho.m.scale(*p);
        }
        if (total - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidConfig(format!("weights sum to {total}")));
        }
        Ok(Self { n, m })
    }

    /// Wraps a matrix known to be a valid state by construction.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        let n = m.nrows().trailing_zeros() as usize;
        Self { n, m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order with matching eigenvector columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        linalg::eigh_desc(&self.m)
    }

    /// Reduced state of the qubits in `keep`, ordered as given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let groups = index_groups(self.n, keep)?;
        let d = 1usize << keep.len();
        let mut out = CMatrix::zeros(d, d);
        for group in &groups {
            for a in 0..d {
                for b in 0..d {
                    out[(a, b)] += self.m[(group[a], group[b])];
                }
            }
        }
        Ok(DensityMatrix { n: keep.len(), m: out })
    }

    /// `U rho U^H` for a unitary `u` on the whole register.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.shape() != self.m.shape() {
            let (rows, cols) = u.shape();
            return Err(Error::Dimension { rows, cols });
        }
        Ok(Self {
            n: self.n,
            m: u * &self.m * u.adjoint(),
        })
    }
}

/// Two-qubit spin flip `(sigma_y x sigma_y) rho* (sigma_y x sigma_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::QubitCount {
            got: rho.n,
            expected: "2",
        });
    }
    let sy = linalg::mat2_to_dynamic(&sigma_y());
    let yy = linalg::kron(&sy, &sy);
    let flipped = &yy * rho.m.conjugate() * &yy;
    Ok(DensityMatrix::from_trusted(flipped))
}

/// Haar-random pure state on `n` qubits drawn from `rng`.
pub fn haar_random_pure_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    check_qubits(n)?;
    loop {
        let amps = complex_gaussian_vec(rng, 1 << n);
        match PureState::normalized(amps, n) {
            Err(Error::ZeroVector) => continue,
            other => return other,
        }
    }
}

/// Haar-random pure state, stream `index` under `seed`.
pub fn haar_random_pure_indexed(n: usize, seed: u64, index: u64) -> Result<PureState> {
    haar_random_pure_with(n, &mut rng::stream(seed, index))
}

/// Haar-random pure state; deterministic in `(n, seed)`.
pub fn haar_random_pure(n: usize, seed: u64) -> Result<PureState> {
    haar_random_pure_indexed(n, seed, 0)
}

/// Random mixed state of the given rank: reduced state of a Haar-random pure
/// state on the register plus a `rank`-dimensional environment.
pub fn random_mixed_with<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let d = 1usize << n;
    if rank == 0 || rank > d {
        return Err(Error::InvalidConfig(format!("rank {rank} outside 1..={d}")));
    }
    let g = CMatrix::from_fn(d, rank, |_, _| rng::complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_trusted(m.unscale(tr)))
}

/// Haar-random single-qubit unitary.
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let u = linalg::random_unitary(2, rng);
    Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
}

/// `U_0 x U_1 x ... x U_{n-1}` as a dense matrix.
pub fn local_unitary(factors: &[Matrix2<Complex64>]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1, 1), |acc, u| {
        linalg::kron(&acc, &linalg::mat2_to_dynamic(u))
    })
}
