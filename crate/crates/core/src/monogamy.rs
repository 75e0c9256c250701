//! Checks of the monogamy inequality `tau_AB + tau_AC <= tau_A(BC)`, the
//! decomposition `tau_A(BC) = tau_AB + tau_AC + tau_ABC`, the trace identities
//! behind them and the equality enjoyed by the n-qubit W family.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C0, C1};
use crate::qstate::{self, PureState};
use crate::rng::{self, complex_gaussian_vec};
use crate::tangle2::{self, eof_from_tangle};
use crate::three_tangle;

/// Largest qubit count accepted by [`nqubit_equality_check`].
pub const MAX_NQUBIT_CHECK: usize = 10;
pub const HISTOGRAM_BINS: usize = 100;

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

fn partners(focus: usize) -> Result<(usize, usize)> {
    match focus {
        0 => Ok((1, 2)),
        1 => Ok((2, 0)),
        2 => Ok((0, 1)),
        _ => Err(Error::InvalidFocus(focus)),
    }
}

/// Tangles of one focus qubit with its two partners and with the pair.
/// For focus B the fields read `tau_BC`, `tau_BA`, `tau_B(CA)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyReport {
    pub focus: usize,
    pub tau_ab: f64,
    pub tau_ac: f64,
    pub tau_a_bc: f64,
    /// `tau_a_bc - tau_ab - tau_ac`
    pub slack: f64,
    pub tau_abc: f64,
}

pub fn ckw_check(psi: &PureState, focus: usize) -> Result<MonogamyReport> {
    require_three(psi)?;
    let (x, y) = partners(focus)?;
    let tau_ab = tangle2::tangle_mixed(&psi.reduced(&[focus, x])?)?;
    let tau_ac = tangle2::tangle_mixed(&psi.reduced(&[focus, y])?)?;
    let tau_a_bc = 4.0 * linalg::det2_hermitian(psi.reduced(&[focus])?.matrix());
    Ok(MonogamyReport {
        focus,
        tau_ab,
        tau_ac,
        tau_a_bc,
        slack: tau_a_bc - tau_ab - tau_ac,
        tau_abc: three_tangle::three_tangle(psi)?,
    })
}

/// Both sides of the single-pair and summed trace identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentities {
    /// `Tr(rho_AB rho~_AB)` by direct product.
    pub overlap_ab: f64,
    /// `2 (det rho_A + det rho_B - det rho_C)`
    pub det_form: f64,
    /// `4 det rho_A`
    pub four_det_a: f64,
    /// `Tr(rho_AC rho~_AC)` by direct product.
    pub overlap_ac: f64,
}

impl TraceIdentities {
    pub fn triple(&self) -> (f64, f64, f64) {
        (self.overlap_ab, self.det_form, self.four_det_a)
    }

    /// `|Tr(rho_AB rho~_AB) - 2 (det A + det B - det C)|`
    pub fn pair_error(&self) -> f64 {
        (self.overlap_ab - self.det_form).abs()
    }

    /// `|Tr(rho_AB rho~_AB) + Tr(rho_AC rho~_AC) - 4 det rho_A|`
    pub fn sum_error(&self) -> f64 {
        (self.overlap_ab + self.overlap_ac - self.four_det_a).abs()
    }
}

pub fn trace_identity_check(psi: &PureState) -> Result<TraceIdentities> {
    require_three(psi)?;
    let det = |q: usize| -> Result<f64> { Ok(linalg::det2_hermitian(psi.reduced(&[q])?.matrix())) };
    let (da, db, dc) = (det(0)?, det(1)?, det(2)?);
    Ok(TraceIdentities {
        overlap_ab: tangle2::flip_overlap(&psi.reduced(&[0, 1])?)?,
        det_form: 2.0 * (da + db - dc),
        four_det_a: 4.0 * da,
        overlap_ac: tangle2::flip_overlap(&psi.reduced(&[0, 2])?)?,
    })
}

/// Entanglements of formation of a focus qubit with each partner and with
/// the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EofReport {
    pub e_ab: f64,
    pub e_ac: f64,
    pub e_a_bc: f64,
}

impl EofReport {
    /// `e_ab + e_ac - e_a_bc`; positive means the concave measure breaks the
    /// sharing inequality that the tangle obeys.
    pub fn excess(&self) -> f64 {
        self.e_ab + self.e_ac - self.e_a_bc
    }
}

pub fn eof_sharing(psi: &PureState, focus: usize) -> Result<EofReport> {
    let r = ckw_check(psi, focus)?;
    Ok(EofReport {
        e_ab: eof_from_tangle(r.tau_ab)?,
        e_ac: eof_from_tangle(r.tau_ac)?,
        e_a_bc: eof_from_tangle(r.tau_a_bc)?,
    })
}

/// `sum_i alpha_i |0..1_i..0>`, with the 1 on qubit `i`.
pub fn wstate_generalized(alphas: &[Complex64]) -> Result<PureState> {
    let n = alphas.len();
    if !(2..=qstate::MAX_QUBITS).contains(&n) {
        return Err(Error::QubitCount {
            got: n,
            expected: "2..=12",
        });
    }
    let mut amps = vec![C0; 1 << n];
    for (i, &a) in alphas.iter().enumerate() {
        amps[1 << (n - 1 - i)] = a;
    }
    PureState::from_amplitudes(amps, n)
}

/// Uniform W state on `n` qubits.
pub fn w_state(n: usize) -> Result<PureState> {
    let a = C1 / (n as f64).sqrt();
    wstate_generalized(&vec![a; n])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NQubitReport {
    /// `sum_{j >= 2} tau_1j`
    pub lhs: f64,
    /// `tau_1(2..n) = 4 det rho_1`
    pub rhs: f64,
    /// `rhs - lhs`
    pub gap: f64,
}

/// Pairwise tangles of qubit 1 versus its tangle with the rest, for a pure
/// state of any supported size.
pub fn nqubit_sharing(psi: &PureState) -> Result<NQubitReport> {
    let n = psi.n();
    if !(2..=MAX_NQUBIT_CHECK).contains(&n) {
        return Err(Error::QubitCount {
            got: n,
            expected: "2..=10",
        });
    }
    let mut lhs = 0.0;
    for j in 1..n {
        lhs += tangle2::tangle_mixed(&psi.reduced(&[0, j])?)?;
    }
    let rhs = 4.0 * linalg::det2_hermitian(psi.reduced(&[0])?.matrix());
    Ok(NQubitReport {
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

pub fn nqubit_equality_check(alphas: &[Complex64]) -> Result<NQubitReport> {
    if alphas.len() > MAX_NQUBIT_CHECK {
        return Err(Error::QubitCount {
            got: alphas.len(),
            expected: "2..=10",
        });
    }
    nqubit_sharing(&wstate_generalized(alphas)?)
}

/// Property checked by [`batch_verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// CKW slack and its agreement with the three-tangle.
    Pure3Ckw,
    /// Three-tangle spread over the six qubit permutations.
    PermInvariance,
    /// Agreement of the d-invariant, epsilon and spectral three-tangles.
    FormulaEquiv,
    /// W-family equality on `n` qubits with random coefficients.
    NQubit(usize),
}

impl VerifyMode {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyMode::Pure3Ckw => "pure3_ckw",
            VerifyMode::PermInvariance => "perm_invariance",
            VerifyMode::FormulaEquiv => "formula_equiv",
            VerifyMode::NQubit(_) => "nqubit",
        }
    }

    /// Parses a mode name; `qubits` only applies to `nqubit`.
    pub fn parse(name: &str, qubits: usize) -> Result<Self> {
        match name {
            "pure3_ckw" => Ok(VerifyMode::Pure3Ckw),
            "perm_invariance" => Ok(VerifyMode::PermInvariance),
            "formula_equiv" => Ok(VerifyMode::FormulaEquiv),
            "nqubit" => {
                if (2..=MAX_NQUBIT_CHECK).contains(&qubits) {
                    Ok(VerifyMode::NQubit(qubits))
                } else {
                    Err(Error::QubitCount {
                        got: qubits,
                        expected: "2..=10",
                    })
                }
            }
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VerifyMode::parse(s, 3)
    }
}

/// Violation thresholds per check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed negative CKW slack.
    pub slack: f64,
    /// `|slack - tau_ABC|`
    pub identity: f64,
    pub permutation: f64,
    pub formula: f64,
    pub nqubit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slack: 1e-10,
            identity: 1e-9,
            permutation: 1e-12,
            formula: 1e-9,
            nqubit: 1e-9,
        }
    }
}

impl Tolerances {
    /// Replaces the tolerance that decides violations for `mode`.
    pub fn with_override(mut self, mode: VerifyMode, tol: f64) -> Self {
        match mode {
            VerifyMode::Pure3Ckw => self.slack = tol,
            VerifyMode::PermInvariance => self.permutation = tol,
            VerifyMode::FormulaEquiv => self.formula = tol,
            VerifyMode::NQubit(_) => self.nqubit = tol,
        }
        self
    }
}

/// Per-sample measurement: `value` is the slack-like quantity that is
/// histogrammed and averaged, `gap` the deviation that must stay small.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOutcome {
    pub value: f64,
    pub gap: f64,
    pub violated: bool,
}

/// The state examined by sample `index` of a batch.
pub fn sample_state(mode: VerifyMode, seed: u64, index: u64) -> Result<PureState> {
    match mode {
        VerifyMode::NQubit(n) => {
            let mut r = rng::stream(seed, index);
            let mut alphas = complex_gaussian_vec(&mut r, n);
            let norm = alphas.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            alphas.iter_mut().for_each(|a| *a /= norm);
            wstate_generalized(&alphas)
        }
        _ => qstate::haar_random_pure_indexed(3, seed, index),
    }
}

pub fn evaluate_sample(mode: VerifyMode, psi: &PureState, tol: &Tolerances) -> Result<SampleOutcome> {
    Ok(match mode {
        VerifyMode::Pure3Ckw => {
            let r = ckw_check(psi, 0)?;
            let gap = (r.slack - r.tau_abc).abs();
            SampleOutcome {
                value: r.slack,
                gap,
                violated: r.slack < -tol.slack || gap > tol.identity,
            }
        }
        VerifyMode::PermInvariance => {
            let gap = three_tangle::permutation_spread(psi)?;
            let value = three_tangle::three_tangle(psi)?;
            SampleOutcome {
                value,
                gap,
                violated: gap > tol.permutation,
            }
        }
        VerifyMode::FormulaEquiv => {
            let a = three_tangle::three_tangle(psi)?;
            let b = three_tangle::three_tangle_epsilon(psi)?;
            let c = three_tangle::residual_tangle_spectral(psi, 0)?;
            let gap = (a - b).abs().max((a - c).abs()).max((b - c).abs());
            SampleOutcome {
                value: a,
                gap,
                violated: gap > tol.formula,
            }
        }
        VerifyMode::NQubit(_) => {
            let r = nqubit_sharing(psi)?;
            SampleOutcome {
                value: r.gap,
                gap: r.gap.abs(),
                violated: r.gap.abs() > tol.nqubit,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStats {
    pub mode: String,
    pub n_samples: u64,
    pub seed: u64,
    /// Smallest per-sample value (the CKW slack in `pure3_ckw`).
    pub min_slack: f64,
    pub max_gap: f64,
    pub mean_slack: f64,
    pub violations: u64,
    /// Index of the first violating sample, if any.
    pub first_violation: Option<u64>,
    /// Counts of per-sample values in 100 uniform bins on [0, 1]; values
    /// outside the interval land in the end bins.
    pub histogram: Vec<u64>,
}

impl BatchStats {
    pub const CSV_HEADER: &'static str = "mode,n_samples,seed,min_slack,max_gap,mean_slack,violations";
}

fn histogram_bin(value: f64) -> usize {
    let b = (value * HISTOGRAM_BINS as f64).floor();
    if b.is_nan() || b < 0.0 {
        0
    } else {
        (b as usize).min(HISTOGRAM_BINS - 1)
    }
}

/// Runs `mode` over samples `0..n_samples` of `seed`. Samples are evaluated
/// in parallel on the current rayon pool and reduced in index order, so the
/// result does not depend on the thread count.
pub fn batch_verify(n_samples: u64, seed: u64, mode: VerifyMode, tol: &Tolerances) -> Result<BatchStats> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    let outcomes: Vec<SampleOutcome> = (0..n_samples)
        .into_par_iter()
        .map(|i| evaluate_sample(mode, &sample_state(mode, seed, i)?, tol))
        .collect::<Result<_>>()?;

    let mut stats = BatchStats {
        mode: mode.name().to_string(),
        n_samples,
        seed,
        min_slack: f64::INFINITY,
        max_gap: 0.0,
        mean_slack: 0.0,
        violations: 0,
        first_violation: None,
        histogram: vec![0; HISTOGRAM_BINS],
    };
    let mut sum = 0.0;
    for (i, o) in outcomes.iter().enumerate() {
        stats.min_slack = stats.min_slack.min(o.value);
        stats.max_gap = stats.max_gap.max(o.gap);
        sum += o.value;
        stats.histogram[histogram_bin(o.value)] += 1;
        if o.violated {
            stats.violations += 1;
            stats.first_violation.get_or_insert(i as u64);
        }
    }
    stats.mean_slack = sum / n_samples as f64;
    Ok(stats)
}
