//! Monte-Carlo check of the Haar sampler against an independent reference.

use ckw_core::qstate::{haar_random_pure_indexed, DensityMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

/// Box-Muller Gaussians on a different generator, normalized by hand.
fn reference_state(rng: &mut rand::rngs::StdRng) -> [Complex64; 4] {
    let mut gauss = || {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * u2)
    };
    let mut v = [gauss(), gauss(), gauss(), gauss()];
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Purity of qubit A for amplitudes (a00, a01, a10, a11).
fn reference_purity(v: &[Complex64; 4]) -> f64 {
    let p0 = v[0].norm_sqr() + v[1].norm_sqr();
    let p1 = v[2].norm_sqr() + v[3].norm_sqr();
    let c = v[0] * v[2].conj() + v[1] * v[3].conj();
    p0 * p0 + p1 * p1 + 2.0 * c.norm_sqr()
}

#[test]
fn two_qubit_marginal_purity() {
    const SAMPLES: u64 = 100_000;
    let mut reference = rand::rngs::StdRng::seed_from_u64(2024);
    let ref_mean = (0..SAMPLES)
        .map(|_| reference_purity(&reference_state(&mut reference)))
        .sum::<f64>()
        / SAMPLES as f64;

    let mean = (0..SAMPLES)
        .map(|i| {
            let psi = haar_random_pure_indexed(2, 7, i).unwrap();
            DensityMatrix::from_pure(&psi).partial_trace(&[0]).unwrap().purity()
        })
        .sum::<f64>()
        / SAMPLES as f64;

    assert!((ref_mean - 0.8).abs() < 0.003, "reference {ref_mean}");
    assert!((mean - 0.8).abs() < 0.003, "sampler {mean}");
    assert!((mean - ref_mean).abs() < 0.003);
}
