use ckw_core::linalg::{self, max_abs_diff};
use ckw_core::qstate::{self, random_mixed_with, random_unitary2, spin_flip, DensityMatrix};
use ckw_core::rng::stream;
use ckw_core::tangle2::{flip_overlap, lambda_spectrum, tangle_mixed, tangle_pure_bipartite};
use ckw_core::three_tangle::{self, three_tangle};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spin_flip_is_an_involution(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_mixed_with(2, rank, &mut stream(seed, 0)).unwrap();
        let twice = spin_flip(&spin_flip(&rho).unwrap()).unwrap();
        prop_assert!(max_abs_diff(twice.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), p in 0.0f64..=1.0, keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..=2)) {
        let mut r = stream(seed, 0);
        let a = random_mixed_with(3, 3, &mut r).unwrap();
        let b = random_mixed_with(3, 5, &mut r).unwrap();
        let mix = DensityMatrix::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        let lhs = mix.partial_trace(&keep).unwrap();
        let ra = a.partial_trace(&keep).unwrap();
        let rb = b.partial_trace(&keep).unwrap();
        let rhs = ra.matrix().scale(p) + rb.matrix().scale(1.0 - p);
        prop_assert!(max_abs_diff(lhs.matrix(), &rhs) < 1e-12);
    }

    #[test]
    fn single_qubit_marginals_of_haar_states_are_states(seed in any::<u64>(), n in 1usize..=6) {
        let psi = qstate::haar_random_pure(n, seed).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        for q in 0..n {
            let m = rho.partial_trace(&[q]).unwrap();
            prop_assert!(DensityMatrix::new(m.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn spectrum_is_sorted_and_matches_flip_overlap(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_mixed_with(2, rank, &mut stream(seed, 1)).unwrap();
        let spec = lambda_spectrum(&rho).unwrap();
        prop_assert!(spec.lambdas.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(spec.lambdas[3] >= 0.0);
        prop_assert!((spec.sum_of_squares() - flip_overlap(&rho).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tangle_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let mut r = stream(seed, 2);
        let rho = random_mixed_with(2, rank, &mut r).unwrap();
        let u = qstate::local_unitary(&[random_unitary2(&mut r), random_unitary2(&mut r)]);
        let rotated = rho.conjugate_by(&u).unwrap();
        prop_assert!((tangle_mixed(&rho).unwrap() - tangle_mixed(&rotated).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tangle_is_convex(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut r = stream(seed, 3);
        let a = random_mixed_with(2, 1 + (seed % 4) as usize, &mut r).unwrap();
        let b = random_mixed_with(2, 1 + (seed / 4 % 4) as usize, &mut r).unwrap();
        let mix = DensityMatrix::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        let lhs = tangle_mixed(&mix).unwrap();
        let rhs = p * tangle_mixed(&a).unwrap() + (1.0 - p) * tangle_mixed(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-10, "{} > {}", lhs, rhs);
    }

    #[test]
    fn pure_tangle_routes_agree(seed in any::<u64>()) {
        let psi = qstate::haar_random_pure(2, seed).unwrap();
        let spectral = tangle_mixed(&DensityMatrix::from_pure(&psi)).unwrap();
        prop_assert!((spectral - tangle_pure_bipartite(&psi, &[0]).unwrap()).abs() < 1e-10);
        prop_assert!((spectral - tangle_pure_bipartite(&psi, &[1]).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn three_tangle_is_permutation_and_lu_invariant(seed in any::<u64>()) {
        let psi = qstate::haar_random_pure(3, seed).unwrap();
        prop_assert!(three_tangle::permutation_spread(&psi).unwrap() < 1e-12);
        let t = three_tangle(&psi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));

        let mut r = stream(seed, 4);
        let mut rotated = psi.clone();
        for q in 0..3 {
            rotated = rotated.apply_single_qubit(q, &random_unitary2(&mut r)).unwrap();
        }
        prop_assert!((three_tangle(&rotated).unwrap() - t).abs() < 1e-10);
    }

    #[test]
    fn cube_invariants_are_permutation_invariant(seed in any::<u64>()) {
        let psi = qstate::haar_random_pure(3, seed).unwrap();
        let base = three_tangle::cube_invariants(&psi).unwrap();
        for perm in three_tangle::PERMUTATIONS {
            let inv = three_tangle::cube_invariants(&psi.permute_qubits(&perm).unwrap()).unwrap();
            prop_assert!((inv.d1 - base.d1).norm() < 1e-12);
            prop_assert!((inv.d2 - base.d2).norm() < 1e-12);
            prop_assert!((inv.d3 - base.d3).norm() < 1e-12);
        }
    }

    #[test]
    fn r_matrix_determinant_identity(seed in any::<u64>()) {
        let psi = qstate::haar_random_pure(3, seed).unwrap();
        let r = three_tangle::r_matrix(&psi).unwrap();
        let comb = three_tangle::cube_invariants(&psi).unwrap().combination().norm();
        prop_assert!((2.0 * r.sqrt_abs_det() * 2.0 - 4.0 * comb).abs() < 1e-9);
    }
}

#[test]
fn local_unitary_matches_kron_of_factors() {
    let mut r = stream(5, 0);
    let us = [random_unitary2(&mut r), random_unitary2(&mut r)];
    let full = qstate::local_unitary(&us);
    assert!(linalg::isometry_defect(&full) < 1e-13);
}
