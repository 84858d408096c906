//! Module-level invariants on randomized corpora, plus property tests for
//! the codecs and profile calculus.

mod common;

use common::{derived_seed, random_strict_upper};
use proptest::prelude::*;
use specsplit_core::assign::multiset_match_distance;
use specsplit_core::ensemble::sample_ginibre;
use specsplit_core::hs::{hs_oracle, Region};
use specsplit_core::io::{matrix_from_json, matrix_to_json, read_matrix_market, write_matrix_market};
use specsplit_core::kernel::{eigenvalues, resolvent_apply, schur_ordered};
use specsplit_core::mat::{C64, OperatorMatrix};
use specsplit_core::stats::{
    dilate2, log_submajorizes, mu_profile, s_transform, SingularValueProfile,
};
use specsplit_core::tri::{quasinilpotent_profile, split, OrderingCurve};
use specsplit_core::Tolerances;

#[test]
fn schur_reconstruction_and_oracle_eigenvalues_random_sizes() {
    let tol = Tolerances::default();
    for &n in &[3usize, 5, 6] {
        for case in 0..4u64 {
            let t = sample_ginibre(n, derived_seed(10, n as u64 * 10 + case));
            let form = schur_ordered(&t, specsplit_core::kernel::ascending_modulus).unwrap();
            let rec_err = (&form.reconstruct() - &t).fro_norm() / t.fro_norm().max(1.0);
            assert!(rec_err <= tol.eps_fact(n), "n={n} rec {rec_err:.3e}");
            assert!(form.unitarity_defect() <= tol.eps_unit(n) * 10.0);
            let oracle = common::charpoly_eigenvalues(&t);
            assert!(multiset_match_distance(&form.eigenvalues(), &oracle) < 1e-8);
        }
    }
}

#[test]
fn resolvent_identity_on_random_eight_by_eight() {
    let tol = Tolerances::default();
    for case in 0..6u64 {
        let t = sample_ginibre(8, derived_seed(20, case));
        let scale = t.op_norm_est();
        let z1 = C64::new(2.0 * scale + 1.0, 0.9);
        let z2 = C64::new(-0.4, -(2.0 * scale + 1.0));
        let r1 = resolvent_apply(&t, z1, &tol).unwrap();
        let r2 = resolvent_apply(&t, z2, &tol).unwrap();
        let lhs = &r1 - &r2;
        let rhs = (&r1 * &r2).scale(z2 - z1);
        let cond = r1.fro_norm().max(r2.fro_norm()).max(1.0);
        assert!((&lhs - &rhs).fro_norm() <= tol.eps_solve(8) * cond * 10.0);
    }
}

#[test]
fn quasinilpotent_profile_reaches_zero_for_split_nilpotents() {
    let tol = Tolerances::default();
    for case in 0..4u64 {
        let t = sample_ginibre(8, derived_seed(30, case));
        let s = split(&t, &OrderingCurve::Lexicographic, &tol).unwrap();
        let profile = quasinilpotent_profile(&s.nilpotent, 8);
        let scale = s.nilpotent.op_norm_est();
        assert!(
            profile[7] <= 1e-8f64.powf(1.0 / 8.0) * scale,
            "profile end {} scale {scale}",
            profile[7]
        );
    }
}

#[test]
fn support_nesting_for_nested_invariant_projections() {
    // Corollary-style check: compressions to nested leading spans have nested
    // eigenvalue multisets.
    let tol = Tolerances::default();
    let t = sample_ginibre(10, 404);
    let s = split(&t, &OrderingCurve::Spiral, &tol).unwrap();
    let u = &s.schur.unitary;
    let eigs_small = specsplit_core::tri::bounds::compression_spectrum(&t, u, 0, 4).unwrap();
    let eigs_large = specsplit_core::tri::bounds::compression_spectrum(&t, u, 0, 7).unwrap();
    // Each eigenvalue of the smaller compression appears in the larger one.
    for &z in &eigs_small {
        let nearest = eigs_large
            .iter()
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-8, "eigenvalue {z} missing ({nearest:.3e})");
    }
}

#[test]
fn commuting_idempotents_have_nested_ranges() {
    // For commuting idempotents with E1 E2 = E1, the range projections nest.
    let tol = Tolerances::default();
    let t = OperatorMatrix::from_diag(&[
        C64::new(0.1, 0.0),
        C64::new(0.3, 0.1),
        C64::new(2.0, 0.0),
        C64::new(3.0, -1.0),
    ]);
    let p1 = hs_oracle(&t, &Region::disk(C64::new(0.2, 0.0), 0.4), &tol).unwrap();
    let p2 = hs_oracle(&t, &Region::disk(C64::new(0.75, 0.0), 1.1), &tol).unwrap();
    let prod = &p1.matrix * &p2.matrix;
    assert!((&prod - &p1.matrix).fro_norm() < 1e-10);
    let identity = OperatorMatrix::identity(4);
    assert!(
        (&(&identity - &p2.matrix) * &p1.matrix).fro_norm() < 1e-10,
        "ranges are nested"
    );
}

#[test]
fn hs_oracle_splits_measure_exactly() {
    let tol = Tolerances::default();
    for case in 0..5u64 {
        let t = sample_ginibre(9, derived_seed(50, case));
        let spectrum = eigenvalues(&t).unwrap();
        let c = spectrum[0];
        // Radius clear of all eigenvalues.
        let mut r = 0.4;
        for _ in 0..60 {
            if spectrum.iter().all(|&z| ((z - c).norm() - r).abs() > 1e-3) {
                break;
            }
            r *= 1.03;
        }
        let p = hs_oracle(&t, &Region::disk(c, r), &tol).unwrap();
        let inside = spectrum.iter().filter(|&&z| (z - c).norm() <= r).count();
        assert_eq!(p.rank(9), inside);
        assert!((p.normalized_rank - inside as f64 / 9.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_market_round_trip(values in proptest::collection::vec(
        (-1e12f64..1e12, -1e12f64..1e12), 1..=16)
    ) {
        let n = (values.len() as f64).sqrt().floor().max(1.0) as usize;
        let m = OperatorMatrix::from_fn(n, |i, j| {
            let (re, im) = values[(i * n + j) % values.len()];
            C64::new(re, im)
        });
        let back = read_matrix_market(&write_matrix_market(&m)).unwrap();
        prop_assert_eq!(m.data(), back.data());
        let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
        prop_assert_eq!(m.data(), back.data());
    }

    #[test]
    fn profile_lookup_is_right_continuous_and_decreasing(
        mut values in proptest::collection::vec(0.0f64..100.0, 1..=12),
        t in 0.001f64..1.0,
    ) {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let p = SingularValueProfile::from_descending(values.clone());
        let n = values.len();
        let v = p.value_at(t);
        let k = (t * n as f64).ceil() as usize;
        prop_assert_eq!(v, values[k.max(1) - 1]);
        // Right continuity at the breakpoints.
        for k in 1..n {
            let bp = k as f64 / n as f64;
            let just_after = (bp + 1e-12).min(1.0);
            prop_assert_eq!(p.value_at(just_after), values[k.min(n - 1)]);
        }
        // Dilation agrees with the pointwise definition.
        let d = p.dilate2();
        prop_assert_eq!(d.value_at(t), p.value_at(t / 2.0));
    }

    #[test]
    fn submajorization_is_reflexive_and_scales(seed in 0u64..400) {
        let t = sample_ginibre(4, seed);
        let tol = Tolerances::default();
        let refl = log_submajorizes(&t, &t, &tol).unwrap();
        prop_assert!(refl.holds);
        // Scaling by 2 dominates: mu doubles pointwise.
        let doubled = t.scale(C64::new(2.0, 0.0));
        prop_assert!(log_submajorizes(&doubled, &t, &tol).unwrap().holds);
    }
}

#[test]
fn s_transform_bound_includes_singular_and_nilpotent_inputs() {
    let tol = Tolerances::default();
    for &n in &[4usize, 16] {
        for case in 0..6u64 {
            let t = match case % 3 {
                0 => sample_ginibre(n, derived_seed(70, case)),
                1 => random_strict_upper(n, derived_seed(70, case)),
                _ => {
                    // Singular: kill two columns.
                    let g = sample_ginibre(n, derived_seed(70, case));
                    OperatorMatrix::from_fn(n, |i, j| {
                        if j < 2 {
                            C64::new(0.0, 0.0)
                        } else {
                            g[(i, j)]
                        }
                    })
                }
            };
            let s = s_transform(&t).unwrap();
            let bound = dilate2(&mu_profile(&t).unwrap()).scale(4.0);
            let report = specsplit_core::stats::log_submajorizes_profiles(
                &bound,
                &s,
                tol.submajorization_slack,
            );
            assert!(report.holds, "n={n} case={case}: {:?}", report.margins);
        }
    }
}
