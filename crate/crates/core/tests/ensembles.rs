//! Statistical checks of the random-matrix ensembles. Seeds are fixed, so
//! these are deterministic regressions despite their statistical character.

mod common;

use common::derived_seed;
use rayon::prelude::*;
use specsplit_core::assign::wasserstein1;
use specsplit_core::ensemble::{regularize, sample_ginibre, sample_z};
use specsplit_core::hs::{hs_oracle, Region};
use specsplit_core::kernel::{eigenvalues, svd};
use specsplit_core::mat::{C64, OperatorMatrix};
use specsplit_core::stats::fk_determinant;
use specsplit_core::tri::{split, OrderingCurve};
use specsplit_core::{Error, Tolerances};

#[test]
fn circular_law_fills_the_unit_disk() {
    // n = 512 spectra over 10 seeds: at least 99% of eigenvalues inside 1.05.
    let n = 512;
    let fractions: Vec<f64> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let g = sample_ginibre(n, derived_seed(2000, seed));
            let eigs = eigenvalues(&g).unwrap();
            eigs.iter().filter(|z| z.norm() <= 1.05).count() as f64 / n as f64
        })
        .collect();
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    assert!(mean >= 0.99, "mean inside-fraction {mean}");
    for (seed, f) in fractions.iter().enumerate() {
        assert!(*f >= 0.97, "seed {seed}: inside fraction {f}");
    }
}

#[test]
fn normalized_trace_obeys_a_clt_bound() {
    let n = 64;
    let trials = 100u64;
    let mut taus = Vec::new();
    for t in 0..trials {
        taus.push(sample_ginibre(n, derived_seed(3000, t)).tau());
    }
    let mean: C64 = taus.iter().sum::<C64>() / trials as f64;
    // tau has standard deviation 1/(n sqrt(2)) per part; the averaged value
    // over `trials` draws stays within 5 sigma of 0.
    let bound = 5.0 / ((n as f64) * (trials as f64).sqrt());
    assert!(mean.norm() <= bound, "mean tau {} vs {bound}", mean.norm());
}

#[test]
fn ginibre_scale_covariance() {
    // Scaling a sample by c matches the generator with variance c^2/n in
    // distribution; check the Frobenius statistic across seeds.
    let n = 32;
    let c = 3.0;
    for seed in 0..5u64 {
        let g = sample_ginibre(n, derived_seed(4000, seed));
        let scaled = g.scale(C64::new(c, 0.0));
        let expected = c * (n as f64).sqrt();
        assert!(
            (scaled.fro_norm() - expected).abs() < 0.25 * expected,
            "seed {seed}"
        );
    }
}

#[test]
fn z_log_moment_is_stable_across_sizes() {
    // Medians of tau(log^+|Z|) at n in {64, 128, 256} vary by < 50%.
    let seeds: Vec<u64> = (0..20).collect();
    let mut medians = Vec::new();
    for &n in &[64usize, 128, 256] {
        let mut values: Vec<f64> = seeds
            .par_iter()
            .map(|&s| {
                let z = sample_z(n, derived_seed(5000 + n as u64, s)).unwrap();
                let vals = svd(&z).unwrap().values;
                vals.iter().map(|&v| v.max(1.0).ln()).sum::<f64>() / n as f64
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(values[values.len() / 2]);
    }
    let lo = medians.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().cloned().fold(0.0f64, f64::max);
    assert!(
        hi / lo < 1.5,
        "medians {medians:?} vary by more than 50%"
    );
}

#[test]
fn z_half_quasinorm_is_finite_and_stable() {
    let mut stats = Vec::new();
    for &n in &[64usize, 128] {
        let mut values: Vec<f64> = (0..8u64)
            .into_par_iter()
            .map(|s| {
                let z = sample_z(n, derived_seed(6000 + n as u64, s)).unwrap();
                let vals = svd(&z).unwrap().values;
                vals.iter().map(|&v| v.sqrt()).sum::<f64>() / n as f64
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        stats.push(values[values.len() / 2]);
    }
    assert!(stats.iter().all(|v| v.is_finite()));
    let ratio = stats[1] / stats[0];
    assert!(
        (0.5..2.0).contains(&ratio),
        "L_1/2 statistic drifts: {stats:?}"
    );
}

#[test]
fn regularized_operator_has_positive_determinants_on_a_grid() {
    // Delta(T + eps Z - lambda) > 0 at every probe of a 5x5 grid.
    let tol = Tolerances::default();
    let n = 64;
    let t = OperatorMatrix::from_fn(n, |i, j| {
        if i == j && i < n / 2 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let perturbed = regularize(&t, 1e-2, 7777).unwrap();
    for gx in 0..5 {
        for gy in 0..5 {
            let lambda = C64::new(-1.5 + 0.75 * gx as f64, -1.5 + 0.75 * gy as f64);
            let delta = fk_determinant(&perturbed.shifted(lambda), &tol).unwrap();
            assert!(delta > 0.0, "delta vanished at {lambda}");
        }
    }
}

#[test]
fn w1_of_pure_noise_obeys_the_median_bound() {
    // nu_{eps Z} collapses to delta_0 with W1 <= 2 eps median|eig(Z)|.
    let n = 128;
    let mut passes = 0;
    let total = 6;
    for seed in 0..total {
        let z = sample_z(n, derived_seed(8000, seed)).unwrap();
        let eigs = eigenvalues(&z).unwrap();
        let mut mods: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = mods[n / 2];
        for &eps in &[1e-1, 1e-2] {
            let scaled: Vec<C64> = eigs.iter().map(|&z| z * eps).collect();
            let zeros = vec![C64::new(0.0, 0.0); n];
            let w1 = wasserstein1(&scaled, &zeros);
            if w1 <= 2.0 * eps * median {
                passes += 1;
            }
        }
    }
    // The spherical-ensemble mean modulus (pi/2) sits under twice the median
    // (2); concentration makes failures rare.
    assert!(passes >= 2 * total as i32 - 1, "passes {passes}");
}

#[test]
fn random_projections_and_splits_succeed_on_perturbed_operators() {
    // Boundary-ambiguity aborts stay under 1% across random disks.
    let tol = Tolerances::default();
    let n = 24;
    let mut attempts = 0u32;
    let mut failures = 0u32;
    for seed in 0..25u64 {
        let base = sample_ginibre(n, derived_seed(9000, seed));
        let t = regularize(&base, 1e-3, derived_seed(9100, seed)).unwrap();
        let center = C64::new(
            ((seed % 5) as f64 - 2.0) * 0.3,
            ((seed % 7) as f64 - 3.0) * 0.2,
        );
        let radius = 0.3 + 0.1 * (seed % 4) as f64;
        attempts += 1;
        match hs_oracle(&t, &Region::disk(center, radius), &tol) {
            Ok(_) => {}
            Err(Error::BoundaryAmbiguous { .. }) => failures += 1,
            Err(e) => panic!("unexpected abort: {e}"),
        }
        attempts += 1;
        if split(&t, &OrderingCurve::Spiral, &tol).is_err() {
            failures += 1;
        }
    }
    assert!(
        (failures as f64) < 0.01 * attempts as f64 + 1.0,
        "{failures}/{attempts} aborts"
    );
}
