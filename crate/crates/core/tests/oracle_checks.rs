//! Cross-checks of the numerical kernels against the independent
//! characteristic-polynomial eigenvalue oracle.

mod common;

use common::{charpoly_eigenvalues, derived_seed, polynomial_roots};
use specsplit_core::assign::multiset_match_distance;
use specsplit_core::ensemble::sample_ginibre;
use specsplit_core::kernel::{schur, svd};
use specsplit_core::mat::{C64, OperatorMatrix};
use specsplit_core::stats::{brown_measure, fk_determinant};
use specsplit_core::Tolerances;

#[test]
fn durand_kerner_finds_known_roots() {
    // (z - 1)(z - 2i)(z + 3) = z^3 + (2 - 2i) z^2 + (-3 - 4i) z + 6i... use
    // direct coefficient construction instead of hand expansion: build from
    // the factored form.
    let targets = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 2.0),
        C64::new(-3.0, 0.0),
    ];
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for &r in &targets {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    let roots = polynomial_roots(&coeffs[1..]);
    assert!(multiset_match_distance(&roots, &targets) < 1e-10);
}

#[test]
fn schur_diagonal_matches_characteristic_roots_small() {
    for n in 2..=6usize {
        for case in 0..8u64 {
            let t = sample_ginibre(n, derived_seed(1234, n as u64 * 100 + case));
            let schur_eigs = schur(&t).unwrap().eigenvalues();
            let oracle = charpoly_eigenvalues(&t);
            let gap = multiset_match_distance(&schur_eigs, &oracle);
            assert!(gap < 1e-8, "n={n} case={case} gap={gap:.3e}");
        }
    }
}

#[test]
fn schur_oracle_agreement_on_defective_matrices() {
    // Jordan-type blocks stress both routes; agreement stays within the
    // cluster radius forced by finite precision.
    let t = OperatorMatrix::from_real_rows(&[
        &[2.0, 1.0, 0.0],
        &[0.0, 2.0, 1.0],
        &[0.0, 0.0, 5.0],
    ])
    .unwrap();
    let schur_eigs = schur(&t).unwrap().eigenvalues();
    let oracle = charpoly_eigenvalues(&t);
    assert!(multiset_match_distance(&schur_eigs, &oracle) < 1e-5);
}

#[test]
fn determinant_agrees_with_characteristic_constant_term() {
    // |det T| is the modulus of the constant coefficient; Delta is its n-th root.
    let tol = Tolerances::default();
    for n in 2..=6usize {
        let t = sample_ginibre(n, derived_seed(77, n as u64));
        let coeffs = common::characteristic_polynomial(&t);
        let det_mod = coeffs.last().unwrap().norm();
        let delta = fk_determinant(&t, &tol).unwrap();
        assert!(
            (delta - det_mod.powf(1.0 / n as f64)).abs() < 1e-10,
            "n={n}: {delta} vs {}",
            det_mod.powf(1.0 / n as f64)
        );
    }
}

#[test]
fn brown_measure_atoms_match_oracle_roots() {
    for n in 2..=5usize {
        let t = sample_ginibre(n, derived_seed(99, n as u64));
        let nu = brown_measure(&t).unwrap();
        let oracle = charpoly_eigenvalues(&t);
        assert!(multiset_match_distance(&nu.support(), &oracle) < 1e-8);
        assert!((nu.total() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn svd_values_square_to_gram_eigenvalues() {
    // Independent route: eigenvalues of T*T from the characteristic oracle.
    for n in 2..=5usize {
        let t = sample_ginibre(n, derived_seed(55, n as u64));
        let gram = &t.adjoint() * &t;
        let oracle: Vec<C64> = charpoly_eigenvalues(&gram);
        let squares: Vec<C64> = svd(&t)
            .unwrap()
            .values
            .iter()
            .map(|&s| C64::new(s * s, 0.0))
            .collect();
        assert!(multiset_match_distance(&squares, &oracle) < 1e-8);
    }
}
