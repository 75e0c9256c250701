//! JSON state files.
//!
//! ```text
//! {"kind":"pure","n":3,"amplitudes":[[re,im],...]}
//! {"kind":"density","n":3,"entries":[[[re,im],...],...]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Pure { n: usize, amplitudes: Vec<[f64; 2]> },
    Density { n: usize, entries: Vec<Vec<[f64; 2]>> },
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serializes")
    }

    pub fn n(&self) -> usize {
        match self {
            StateFile::Pure { n, .. } | StateFile::Density { n, .. } => *n,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        StateFile::Pure {
            n: psi.n(),
            amplitudes: psi.amplitudes().iter().copied().map(pair).collect(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        StateFile::Density {
            n: rho.n(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
                .collect(),
        }
    }

    /// The pure state, if this file holds one.
    pub fn to_pure(&self) -> Result<PureState> {
        match self {
            StateFile::Pure { n, amplitudes } => {
                if *n > super::MAX_QUBITS || amplitudes.len() != 1usize << n {
                    return Err(Error::LengthMismatch {
                        n: *n,
                        expected: 1usize.checked_shl(*n as u32).unwrap_or(0),
                        got: amplitudes.len(),
                    });
                }
                let amps = amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                PureState::from_amplitudes(amps, *n)
            }
            StateFile::Density { .. } => Err(Error::Format("expected a pure state".into())),
        }
    }

    /// The density matrix (a pure file is promoted to its projector).
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            StateFile::Pure { .. } => Ok(DensityMatrix::from_pure(&self.to_pure()?)),
            StateFile::Density { n, entries } => {
                let dim = 1usize.checked_shl(*n as u32).unwrap_or(0);
                if *n == 0 || *n > super::MAX_QUBITS || entries.len() != dim {
                    return Err(Error::Format(format!(
                        "density matrix for {n} qubits must have {dim} rows, got {}",
                        entries.len()
                    )));
                }
                if let Some(row) = entries.iter().find(|row| row.len() != dim) {
                    return Err(Error::Format(format!("row of length {} (expected {dim})", row.len())));
                }
                let m = CMatrix::from_fn(dim, dim, |i, j| {
                    let [re, im] = entries[i][j];
                    Complex64::new(re, im)
                });
                DensityMatrix::new(m)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pure_and_density() {
        let pure = StateFile::from_json(r#"{"kind":"pure","n":1,"amplitudes":[[1,0],[0,0]]}"#).unwrap();
        assert_eq!(pure.to_pure().unwrap(), PureState::basis(1, 0).unwrap());

        let dens =
            StateFile::from_json(r#"{"kind":"density","n":1,"entries":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert_eq!(dens.to_density().unwrap(), DensityMatrix::maximally_mixed(1).unwrap());
        assert!(dens.to_pure().is_err());
    }

    #[test]
    fn rejects_wrong_counts() {
        let f = StateFile::from_json(r#"{"kind":"pure","n":2,"amplitudes":[[1,0],[0,0]]}"#).unwrap();
        assert!(matches!(f.to_pure(), Err(Error::LengthMismatch { .. })));
        let f = StateFile::from_json(r#"{"kind":"density","n":1,"entries":[[[1,0]]]}"#).unwrap();
        assert!(f.to_density().is_err());
        assert!(StateFile::from_json(r#"{"kind":"mixed","n":1}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let psi = super::super::haar_random_pure(3, 1).unwrap();
        let back = StateFile::from_json(&StateFile::from_pure(&psi).to_json()).unwrap();
        let back = back.to_pure().unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let rho = DensityMatrix::from_pure(&psi);
        let back = StateFile::from_json(&StateFile::from_density(&rho).to_json()).unwrap();
        assert_eq!(back.to_density().unwrap().matrix(), rho.matrix());
    }
}
