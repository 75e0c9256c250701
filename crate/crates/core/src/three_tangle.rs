//! Three-qubit invariants.
//!
//! The three-way tangle is `4 |d1 - 2 d2 + 4 d3|`, where the `d_i` are sums of
//! quartic amplitude products grouped by how the four corners of the
//! amplitude cube sit around its center: a body diagonal used twice (`d1`),
//! a diagonal plane (`d2`), or a tetrahedron (`d3`). Two independent routes
//! to the same number are provided for cross-checking: the epsilon-tensor
//! contraction and the spectral residual `tau_A(BC) - tau_AB - tau_AC`.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::C0;
use crate::qstate::{PureState, EPSILON, SIGMA_Y};
use crate::tangle2;

fn require_three(psi: &PureState) -> Result<()> {
    if psi.n() == 3 {
        Ok(())
    } else {
        Err(Error::QubitCount {
            got: psi.n(),
            expected: "3",
        })
    }
}

#[inline]
fn amp(psi: &PureState, i: usize, j: usize, k: usize) -> Complex64 {
    psi.amplitudes()[4 * i + 2 * j + k]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeInvariants {
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl CubeInvariants {
    /// `d1 - 2 d2 + 4 d3`, combined before any modulus is taken.
    pub fn combination(&self) -> Complex64 {
        self.d1 - 2.0 * self.d2 + 4.0 * self.d3
    }
}

pub fn cube_invariants(psi: &PureState) -> Result<CubeInvariants> {
    require_three(psi)?;
    let a = |i, j, k| amp(psi, i, j, k);
    let (a000, a001, a010, a011) = (a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1));
    let (a100, a101, a110, a111) = (a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1));

    let d1 =
        a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok(CubeInvariants { d1, d2, d3 })
}

/// Three-way tangle `4 |d1 - 2 d2 + 4 d3|`.
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    Ok(4.0 * cube_invariants(psi)?.combination().norm())
}

/// Three-way tangle from the epsilon contraction
/// `2 |sum a_ijk a_i'j'm a_npk' a_n'p'm' eps_ii' eps_jj' eps_kk' eps_mm' eps_nn' eps_pp'|`,
/// enumerated over all 4096 index assignments.
pub fn three_tangle_epsilon(psi: &PureState) -> Result<f64> {
    require_three(psi)?;
    let a = |i, j, k| amp(psi, i, j, k);
    let mut sum = C0;
    for idx in 0..1usize << 12 {
        let bit = |b: usize| (idx >> b) & 1;
        let (i, i_, j, j_, k, k_) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        let (m, m_, n, n_, p, p_) = (bit(6), bit(7), bit(8), bit(9), bit(10), bit(11));
        let sign = EPSILON[i][i_] * EPSILON[j][j_] * EPSILON[k][k_] * EPSILON[m][m_] * EPSILON[n][n_] * EPSILON[p][p_];
        if sign == 0.0 {
            continue;
        }
        sum += a(i, j, k) * a(i_, j_, m) * a(n, p, k_) * a(n_, p_, m_) * sign;
    }
    Ok(2.0 * sum.norm())
}

/// `R` acting on span{|v0>, |v1>}, where `|v_k>` collects the amplitudes with
/// last index `k`:
/// `R_ij = sum a_klj a*_mni s_mp s_nq a*_pqr a_str s_sk s_tl` with `s = sigma_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix {
    pub entries: Matrix2<Complex64>,
}

impl RMatrix {
    pub fn det(&self) -> Complex64 {
        self.entries.determinant()
    }

    /// `sqrt|det R|`, equal to `l1 * l2` of the AB pair.
    pub fn sqrt_abs_det(&self) -> f64 {
        self.det().norm().sqrt()
    }
}

pub fn r_matrix(psi: &PureState) -> Result<RMatrix> {
    require_three(psi)?;
    let a = |i, j, k| amp(psi, i, j, k);
    let s = |x: usize, y: usize| SIGMA_Y[x][y];
    let mut entries = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C0;
            for idx in 0..1usize << 9 {
                let bit = |b: usize| (idx >> b) & 1;
                let (k, l, m, n, p, q, r, s_, t) =
                    (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5), bit(6), bit(7), bit(8));
                let weight = s(m, p) * s(n, q) * s(s_, k) * s(t, l);
                if weight == C0 {
                    continue;
                }
                acc += a(k, l, j) * a(m, n, i).conj() * a(p, q, r).conj() * a(s_, t, r) * weight;
            }
            entries[(i, j)] = acc;
        }
    }
    Ok(RMatrix { entries })
}

fn others(focus: usize) -> Result<(usize, usize)> {
    match focus {
        0 => Ok((1, 2)),
        1 => Ok((2, 0)),
        2 => Ok((0, 1)),
        _ => Err(Error::InvalidFocus(focus)),
    }
}

/// `tau_f(xy) - tau_fx - tau_fy` from the bipartite and two-qubit tangles.
pub fn residual_tangle_spectral(psi: &PureState, focus: usize) -> Result<f64> {
    require_three(psi)?;
    let (x, y) = others(focus)?;
    let whole = tangle2::tangle_pure_bipartite(psi, &[focus])?;
    let fx = tangle2::tangle_mixed(&psi.reduced(&[focus, x])?)?;
    let fy = tangle2::tangle_mixed(&psi.reduced(&[focus, y])?)?;
    Ok(whole - fx - fy)
}

/// All six relabellings of three qubits.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Largest minus smallest three-tangle over the six qubit permutations.
pub fn permutation_spread(psi: &PureState) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for perm in PERMUTATIONS {
        let t = three_tangle(&psi.permute_qubits(&perm)?)?;
        lo = lo.min(t);
        hi = hi.max(t);
    }
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_pure, DensityMatrix};

    fn state(pairs: &[(usize, f64)]) -> PureState {
        let mut amps = vec![C0; 8];
        for &(i, v) in pairs {
            amps[i] = Complex64::new(v, 0.0);
        }
        PureState::normalized(amps, 3).unwrap()
    }

    fn w_state() -> PureState {
        state(&[(0b100, 1.0), (0b010, 1.0), (0b001, 1.0)])
    }

    /// Groups every 4-multiset of cube corners whose centroid is the cube
    /// center by shape and sums the amplitude products in each group.
    fn cube_oracle(psi: &PureState) -> [Complex64; 3] {
        let coords = |c: usize| [(c >> 2) & 1, (c >> 1) & 1, c & 1];
        let mut out = [C0; 3];
        for c1 in 0..8 {
            for c2 in c1..8 {
                for c3 in c2..8 {
                    for c4 in c3..8 {
                        let corners = [c1, c2, c3, c4];
                        let centered = (0..3).all(|ax| corners.iter().map(|&c| coords(c)[ax]).sum::<usize>() == 2);
                        if !centered {
                            continue;
                        }
                        let product: Complex64 = corners.iter().map(|&c| psi.amplitudes()[c]).product();
                        let repeated = c1 == c2 || c2 == c3 || c3 == c4;
                        let antipodal = corners.iter().any(|&x| corners.contains(&(7 - x)));
                        let class = if repeated {
                            0
                        } else if antipodal {
                            1
                        } else {
                            2
                        };
                        out[class] += product;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn ghz_and_w_invariants() {
        let ghz = PureState::ghz(3).unwrap();
        let inv = cube_invariants(&ghz).unwrap();
        assert!((inv.d1 - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert_eq!((inv.d2, inv.d3), (C0, C0));
        let inv = cube_invariants(&w_state()).unwrap();
        assert_eq!((inv.d1, inv.d2, inv.d3), (C0, C0, C0));
    }

    #[test]
    fn invariants_match_cube_enumeration() {
        for seed in 0..50 {
            let psi = haar_random_pure(3, seed).unwrap();
            let inv = cube_invariants(&psi).unwrap();
            let [o1, o2, o3] = cube_oracle(&psi);
            assert!((inv.d1 - o1).norm() < 1e-15);
            assert!((inv.d2 - o2).norm() < 1e-15);
            assert!((inv.d3 - o3).norm() < 1e-15);
        }
    }

    #[test]
    fn three_tangle_examples() {
        let ghz = PureState::ghz(3).unwrap();
        assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-15);
        assert!((three_tangle_epsilon(&ghz).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(three_tangle(&w_state()).unwrap(), 0.0);
        assert_eq!(three_tangle_epsilon(&w_state()).unwrap(), 0.0);
        let w_class = state(&[(0b100, 0.3), (0b010, -0.8), (0b001, 0.52)]);
        assert_eq!(three_tangle(&w_class).unwrap(), 0.0);
    }

    #[test]
    fn r_matrix_examples() {
        let r = r_matrix(&PureState::ghz(3).unwrap()).unwrap();
        assert!((r.det() - Complex64::new(1.0 / 16.0, 0.0)).norm() < 1e-15);
        assert!((r.sqrt_abs_det() - 0.25).abs() < 1e-15);
        assert!(r_matrix(&w_state()).unwrap().det().norm() < 1e-15);
    }

    #[test]
    fn r_matrix_matches_spectrum() {
        for seed in 0..100 {
            let psi = haar_random_pure(3, seed).unwrap();
            let r = r_matrix(&psi).unwrap();
            let lam = tangle2::lambda_spectrum(&psi.reduced(&[0, 1]).unwrap()).unwrap();
            let product = lam.lambdas[0] * lam.lambdas[1];
            assert!((r.sqrt_abs_det() - product).abs() < 1e-9);
            let comb = cube_invariants(&psi).unwrap().combination().norm();
            assert!((r.sqrt_abs_det() - comb).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_examples() {
        let ghz = PureState::ghz(3).unwrap();
        assert!((residual_tangle_spectral(&ghz, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!(residual_tangle_spectral(&w_state(), 1).unwrap().abs() < 1e-14);
        assert!(matches!(residual_tangle_spectral(&ghz, 3), Err(Error::InvalidFocus(3))));
        for seed in 0..100 {
            let psi = haar_random_pure(3, 1000 + seed).unwrap();
            let t = three_tangle(&psi).unwrap();
            for focus in 0..3 {
                assert!((residual_tangle_spectral(&psi, focus).unwrap() - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn wrong_qubit_count() {
        let psi = haar_random_pure(2, 0).unwrap();
        assert!(cube_invariants(&psi).is_err());
        assert!(three_tangle(&psi).is_err());
        assert!(three_tangle_epsilon(&psi).is_err());
        assert!(r_matrix(&psi).is_err());
        assert!(residual_tangle_spectral(&psi, 0).is_err());
    }

    #[test]
    fn ghz_residual_uses_mixed_pairs() {
        let ghz = PureState::ghz(3).unwrap();
        let ab = DensityMatrix::from_pure(&ghz).partial_trace(&[0, 1]).unwrap();
        assert!(tangle2::tangle_mixed(&ab).unwrap() < 1e-15);
    }
}
