//! Named states reachable with `--builtin`.

use anyhow::{bail, Context};
use ckw_core::monogamy::wstate_generalized;
use ckw_core::{DensityMatrix, PureState};
use num_complex::Complex64;

pub const NAMES: &str = "ghz, w, singlet, eof-example, ghz-mixture, eq15:ALPHA,BETA,GAMMA";

pub enum Builtin {
    Pure(PureState),
    Density(DensityMatrix),
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn lookup(name: &str) -> anyhow::Result<Builtin> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    Ok(match name {
        "ghz" => Builtin::Pure(PureState::ghz(3)?),
        "w" => Builtin::Pure(wstate_generalized(&[real(t), real(t), real(t)])?),
        "singlet" => Builtin::Pure(PureState::from_amplitudes(
            vec![real(0.0), real(s), real(-s), real(0.0)],
            2,
        )?),
        "eof-example" => Builtin::Pure(wstate_generalized(&[real(s), real(0.5), real(0.5)])?),
        "ghz-mixture" => {
            let a = DensityMatrix::from_pure(&PureState::basis(3, 0)?);
            let b = DensityMatrix::from_pure(&PureState::basis(3, 7)?);
            Builtin::Density(DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)])?)
        }
        other => match other.strip_prefix("eq15:") {
            Some(args) => {
                let coeffs = args
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .with_context(|| format!("bad coefficient `{x}`"))
                    })
                    .collect::<anyhow::Result<Vec<f64>>>()?;
                if coeffs.len() != 3 {
                    bail!("eq15 takes three coefficients, got {}", coeffs.len());
                }
                // typed-in coefficients are rounded, so rescale explicitly
                let mut amps = vec![real(0.0); 8];
                amps[0b100] = real(coeffs[0]);
                amps[0b010] = real(coeffs[1]);
                amps[0b001] = real(coeffs[2]);
                Builtin::Pure(PureState::normalized(amps, 3)?)
            }
            None => bail!("unknown builtin `{other}` (known: {NAMES})"),
        },
    })
}
