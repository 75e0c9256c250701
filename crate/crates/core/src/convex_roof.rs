//! Upper bounds on `tau^min_A(BC)`, the smallest average `tau_A(BC)` over
//! pure-state decompositions of a mixed three-qubit state.
//!
//! Every decomposition of `rho` with `m` members is reached by an `m x r`
//! isometry `V` acting on the scaled eigenvectors of `rho`
//! (`phi_i = sum_j V_ij sqrt(mu_j) e_j`). The search runs a random-restart
//! stochastic descent over such isometries. It never certifies the true
//! minimum, so every reported value is an upper bound.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C0, C1};
use crate::qstate::{DensityMatrix, PureState};
use crate::rng::{self, complex_gaussian};
use crate::tangle2;

/// Eigenvalues of `rho` above this count toward its rank.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Components lighter than this are dropped from a decomposition.
pub const MIN_WEIGHT: f64 = 1e-14;
pub const ISOMETRY_TOLERANCE: f64 = 1e-8;
/// A roof bound below `tau_AB + tau_AC` by more than this is a failure.
pub const MARGIN_TOLERANCE: f64 = 1e-8;

fn require_three(rho: &DensityMatrix) -> Result<()> {
    if rho.n() == 3 {
        Ok(())
    } else {
        Err(Error::QubitCount {
            got: rho.n(),
            expected: "3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub p: f64,
    #[serde(serialize_with = "serialize_amplitudes", rename = "amplitudes")]
    pub psi: PureState,
}

fn serialize_amplitudes<S: serde::Serializer>(psi: &PureState, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(psi.dim()))?;
    for a in psi.amplitudes() {
        seq.serialize_element(&[a.re, a.im])?;
    }
    seq.end()
}

/// Probability-weighted pure states.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Decomposition {
    pub components: Vec<Component>,
}

impl Decomposition {
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.p).sum()
    }

    /// `sum p_i |psi_i><psi_i|`
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.components.first().map_or(0, |c| c.psi.dim());
        let mut m = CMatrix::zeros(d, d);
        for c in &self.components {
            let v = c.psi.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += v[i] * v[j].conj() * c.p;
                }
            }
        }
        m
    }

    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.reconstruct(), rho.matrix())
    }
}

/// `sqrt(mu_j) e_j` for the eigenvalues above [`RANK_TOLERANCE`].
fn scaled_eigenvectors(rho: &DensityMatrix) -> Result<CMatrix> {
    let (values, vectors) = rho.eigen()?;
    let rank = values.iter().take_while(|&&v| v > RANK_TOLERANCE).count();
    Ok(CMatrix::from_fn(rho.dim(), rank, |i, j| {
        vectors[(i, j)] * values[j].sqrt()
    }))
}

pub fn rank(rho: &DensityMatrix) -> Result<usize> {
    let (values, _) = rho.eigen()?;
    Ok(values.iter().filter(|&&v| v > RANK_TOLERANCE).count())
}

fn check_isometry(v: &CMatrix, r: usize) -> Result<()> {
    if v.ncols() != r || v.nrows() < r {
        return Err(Error::InvalidConfig(format!(
            "mixing matrix is {}x{}, need m x {r} with m >= {r}",
            v.nrows(),
            v.ncols()
        )));
    }
    let defect = linalg::isometry_defect(v);
    if defect > ISOMETRY_TOLERANCE {
        return Err(Error::NotIsometry(defect));
    }
    Ok(())
}

fn decomposition_from_factor(basis: &CMatrix, v: &CMatrix) -> Decomposition {
    // row i of V * B^T is the unnormalized i-th member
    let states = v * basis.transpose();
    let components = (0..states.nrows())
        .filter_map(|i| {
            let amps: Vec<Complex64> = states.row(i).iter().copied().collect();
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if p < MIN_WEIGHT {
                return None;
            }
            let psi = PureState::normalized(amps, basis.nrows().trailing_zeros() as usize).ok()?;
            Some(Component { p, psi })
        })
        .collect();
    Decomposition { components }
}

/// Decomposition of `rho` selected by the isometry `v` (m x rank).
pub fn decomposition_from_mixing(rho: &DensityMatrix, v: &CMatrix) -> Result<Decomposition> {
    let basis = scaled_eigenvectors(rho)?;
    check_isometry(v, basis.ncols())?;
    Ok(decomposition_from_factor(&basis, v))
}

/// `sum p_i tau_A(BC)(psi_i)`
pub fn average_tangle_a_bc(d: &Decomposition) -> Result<f64> {
    d.components
        .iter()
        .map(|c| Ok(c.p * tangle2::tangle_pure_bipartite(&c.psi, &[0])?))
        .sum()
}

/// Objective straight from the unnormalized members: each contributes
/// `p tau = 4 det(rho_A~) / p` with `rho_A~` the unnormalized marginal.
fn objective(basis: &CMatrix, v: &CMatrix) -> f64 {
    let states = v * basis.transpose();
    let half = states.ncols() / 2;
    let mut total = 0.0;
    for i in 0..states.nrows() {
        let row = states.row(i);
        let (mut n0, mut n1, mut overlap) = (0.0, 0.0, C0);
        for k in 0..half {
            let (x0, x1) = (row[k], row[k + half]);
            n0 += x0.norm_sqr();
            n1 += x1.norm_sqr();
            overlap += x1.conj() * x0;
        }
        let p = n0 + n1;
        if p < MIN_WEIGHT {
            continue;
        }
        total += 4.0 * (n0 * n1 - overlap.norm_sqr()).max(0.0) / p;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofConfig {
    /// Decomposition size; `None` uses rank squared.
    pub components: Option<usize>,
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub initial_step: f64,
    /// Step multiplier applied after `patience` consecutive rejected moves.
    pub decay: f64,
    pub patience: usize,
    pub min_step: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            components: None,
            restarts: 16,
            max_evals: 20_000,
            initial_step: 0.3,
            decay: 0.95,
            patience: 10,
            min_step: 1e-6,
            seed: 0,
        }
    }
}

impl RoofConfig {
    fn validate(&self, rank: usize) -> Result<usize> {
        let m = self.components.unwrap_or(rank * rank);
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if m < rank {
            return bad(format!("{m} components cannot reach rank {rank}"));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.max_evals == 0 || self.patience == 0 {
            return bad("max_evals and patience must be positive".into());
        }
        if !(self.initial_step > 0.0 && self.min_step > 0.0) {
            return bad("steps must be positive".into());
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad(format!("decay {} outside (0, 1)", self.decay));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofResult {
    /// Best average `tau_A(BC)` found; an upper bound on the minimum.
    pub upper_bound: f64,
    #[serde(rename = "components")]
    pub best: Decomposition,
    pub restarts_used: usize,
    pub evaluations: usize,
    /// Decomposition size searched over.
    pub components_cap: usize,
}

struct RestartOutcome {
    value: f64,
    v: CMatrix,
    evals: usize,
}

fn initial_isometry(m: usize, r: usize, restart: usize, rng: &mut rng::StreamRng) -> CMatrix {
    if restart == 0 {
        // the eigen-decomposition itself, padded with empty members
        CMatrix::from_fn(m, r, |i, j| if i == j { C1 } else { C0 })
    } else {
        linalg::random_isometry(m, r, rng)
    }
}

fn run_restart(basis: &CMatrix, m: usize, restart: usize, cfg: &RoofConfig) -> RestartOutcome {
    let r = basis.ncols();
    let mut rng = rng::stream(cfg.seed, restart as u64);
    let mut v = initial_isometry(m, r, restart, &mut rng);
    let mut value = objective(basis, &v);
    let mut evals = 1;
    let mut step = cfg.initial_step;
    let mut rejected = 0;
    while evals < cfg.max_evals && step >= cfg.min_step {
        let z = CMatrix::from_fn(m, r, |_, _| complex_gaussian(&mut rng));
        // project onto the tangent space: V^H Z skew-Hermitian
        let vz = v.adjoint() * &z;
        let sym = (&vz + vz.adjoint()).scale(0.5);
        let mut dir = &z - &v * sym;
        let norm = dir.norm();
        if norm > 0.0 {
            dir.unscale_mut(norm);
        }
        let mut candidate = &v + dir.scale(step);
        let trial = if linalg::orthonormalize_columns(&mut candidate) {
            evals += 1;
            objective(basis, &candidate)
        } else {
            f64::INFINITY
        };
        if trial < value {
            v = candidate;
            value = trial;
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= cfg.patience {
                step *= cfg.decay;
                rejected = 0;
            }
        }
    }
    RestartOutcome { value, v, evals }
}

/// Searches decompositions of `rho` for a small average `tau_A(BC)`.
///
/// Restarts are independent (restart 0 starts from the eigen-decomposition,
/// the rest from random isometries) and run in parallel; the best is chosen
/// with ties going to the lowest restart index. For a fixed seed the result
/// never increases as `max_evals` grows.
pub fn minimize_tau_a_bc(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofResult> {
    require_three(rho)?;
    let basis = scaled_eigenvectors(rho)?;
    let m = cfg.validate(basis.ncols())?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(&basis, m, k, cfg))
        .collect();

    let evaluations = outcomes.iter().map(|o| o.evals).sum();
    let mut best = &outcomes[0];
    for o in &outcomes[1..] {
        if o.value < best.value {
            best = o;
        }
    }
    let decomposition = decomposition_from_factor(&basis, &best.v);
    Ok(RoofResult {
        upper_bound: average_tangle_a_bc(&decomposition)?,
        best: decomposition,
        restarts_used: cfg.restarts,
        evaluations,
        components_cap: m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedMonogamyReport {
    pub tau_ab: f64,
    pub tau_ac: f64,
    pub roof_upper_bound: f64,
    /// `roof_upper_bound - tau_ab - tau_ac`
    pub margin: f64,
    /// Set when `margin < -MARGIN_TOLERANCE`.
    pub failed: bool,
    #[serde(skip)]
    pub roof: RoofResult,
}

/// Compares `tau_AB + tau_AC` of a mixed state with the roof bound.
pub fn mixed_monogamy_check(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<MixedMonogamyReport> {
    require_three(rho)?;
    let tau_ab = tangle2::tangle_mixed(&rho.partial_trace(&[0, 1])?)?;
    let tau_ac = tangle2::tangle_mixed(&rho.partial_trace(&[0, 2])?)?;
    let roof = minimize_tau_a_bc(rho, cfg)?;
    let margin = roof.upper_bound - tau_ab - tau_ac;
    Ok(MixedMonogamyReport {
        tau_ab,
        tau_ac,
        roof_upper_bound: roof.upper_bound,
        margin,
        failed: margin < -MARGIN_TOLERANCE,
        roof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate;

    fn classical_ghz() -> DensityMatrix {
        let a = DensityMatrix::from_pure(&PureState::basis(3, 0).unwrap());
        let b = DensityMatrix::from_pure(&PureState::basis(3, 7).unwrap());
        DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)]).unwrap()
    }

    #[test]
    fn identity_mixing_is_eigendecomposition() {
        let mut r = rng::stream(21, 0);
        let rho = qstate::random_mixed_with(3, 3, &mut r).unwrap();
        let (values, vectors) = rho.eigen().unwrap();
        let v = CMatrix::identity(3, 3);
        let d = decomposition_from_mixing(&rho, &v).unwrap();
        assert_eq!(d.components.len(), 3);
        for (j, c) in d.components.iter().enumerate() {
            assert!((c.p - values[j]).abs() < 1e-14);
            let overlap: Complex64 = c
                .psi
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| vectors[(i, j)].conj() * a)
                .sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_mixing_gives_ghz_pair() {
        let rho = classical_ghz();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        let d = decomposition_from_mixing(&rho, &v).unwrap();
        assert_eq!(d.components.len(), 2);
        for c in &d.components {
            assert!((c.p - 0.5).abs() < 1e-14);
            let a = c.psi.amplitudes();
            assert!((a[0].norm() - s).abs() < 1e-14 && (a[7].norm() - s).abs() < 1e-14);
        }
        assert!((average_tangle_a_bc(&d).unwrap() - 1.0).abs() < 1e-14);
        assert!(d.reconstruction_error(&rho) < 1e-14);
    }

    #[test]
    fn eigendecomposition_of_classical_mixture_has_zero_average() {
        let rho = classical_ghz();
        let d = decomposition_from_mixing(&rho, &CMatrix::identity(2, 2)).unwrap();
        assert!(average_tangle_a_bc(&d).unwrap() < 1e-15);
    }

    #[test]
    fn random_isometry_reconstructs() {
        let mut r = rng::stream(22, 0);
        let rho = qstate::random_mixed_with(3, 3, &mut r).unwrap();
        let v = linalg::random_isometry(7, 3, &mut r);
        let d = decomposition_from_mixing(&rho, &v).unwrap();
        assert!(d.reconstruction_error(&rho) < 1e-8);
        assert!((d.total_weight() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixing_errors() {
        let rho = classical_ghz();
        let not_iso = CMatrix::from_element(2, 2, C1);
        assert!(matches!(
            decomposition_from_mixing(&rho, &not_iso),
            Err(Error::NotIsometry(_))
        ));
        let narrow = CMatrix::identity(1, 1);
        assert!(matches!(
            decomposition_from_mixing(&rho, &narrow),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn objective_matches_average_tangle() {
        let mut r = rng::stream(23, 0);
        let rho = qstate::random_mixed_with(3, 2, &mut r).unwrap();
        let basis = scaled_eigenvectors(&rho).unwrap();
        for _ in 0..10 {
            let v = linalg::random_isometry(4, 2, &mut r);
            let fast = objective(&basis, &v);
            let slow = average_tangle_a_bc(&decomposition_from_factor(&basis, &v)).unwrap();
            assert!((fast - slow).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_input_has_single_decomposition() {
        let rho = DensityMatrix::from_pure(&PureState::ghz(3).unwrap());
        let res = minimize_tau_a_bc(&rho, &RoofConfig::default()).unwrap();
        assert!((res.upper_bound - 1.0).abs() < 1e-12);
        assert_eq!(res.components_cap, 1);
    }

    #[test]
    fn config_validation() {
        let rho = classical_ghz();
        let bad = [
            RoofConfig {
                components: Some(1),
                ..Default::default()
            },
            RoofConfig {
                restarts: 0,
                ..Default::default()
            },
            RoofConfig {
                decay: 1.0,
                ..Default::default()
            },
            RoofConfig {
                max_evals: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(minimize_tau_a_bc(&rho, &cfg), Err(Error::InvalidConfig(_))));
        }
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(minimize_tau_a_bc(&two, &RoofConfig::default()).is_err());
    }

    #[test]
    fn ghz_mixed_check() {
        let rho = DensityMatrix::from_pure(&PureState::ghz(3).unwrap());
        let rep = mixed_monogamy_check(&rho, &RoofConfig::default()).unwrap();
        assert!((rep.margin - 1.0).abs() < 1e-12);
        assert!(!rep.failed);
    }
}
