//! Shared test support: an independent characteristic-polynomial eigenvalue
//! oracle and corpus generators. The oracle never touches the Schur path it
//! is used to check.

#![allow(dead_code)]

use specsplit_core::ensemble::sample_ginibre;
use specsplit_core::kernel::svd;
use specsplit_core::mat::{C64, OperatorMatrix};

/// Coefficients of the characteristic polynomial
/// lambda^n + c[0] lambda^(n-1) + ... + c[n-1], by the Faddeev-LeVerrier
/// recursion (trace arithmetic only).
pub fn characteristic_polynomial(a: &OperatorMatrix) -> Vec<C64> {
    let n = a.dim();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = a.clone();
    let mut c = -m.trace();
    coeffs.push(c);
    for k in 2..=n {
        let mut shifted = m;
        // M <- A (M + c I)
        let dim = a.dim();
        for i in 0..dim {
            shifted[(i, i)] += c;
        }
        m = a * &shifted;
        c = -m.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

fn eval_monic(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// Durand-Kerner iteration for the roots of a monic polynomial; intended for
/// the small static oracle cases (degree <= 8).
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    let radius = 1.0
        + coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    // Distinct starting angles off any symmetry axis.
    let mut roots: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius * 0.7, 0.4 + 1.9 * k as f64))
        .collect();
    for _ in 0..400 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Perturb coincident iterates apart.
                roots[i] += C64::new(1e-8 * radius, 1e-8 * radius);
                continue;
            }
            let delta = eval_monic(coeffs, roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Eigenvalues by characteristic roots; independent of the Schur kernel.
pub fn charpoly_eigenvalues(a: &OperatorMatrix) -> Vec<C64> {
    polynomial_roots(&characteristic_polynomial(a))
}

pub fn derived_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e3779b97f4a7c15) ^ salt.rotate_left(17)
}

/// Haar-like random unitary: left singular vectors of a Ginibre sample.
pub fn random_unitary(n: usize, seed: u64) -> OperatorMatrix {
    svd(&sample_ginibre(n, seed)).expect("svd converges").u
}

/// Strictly upper triangular matrix with Gaussian entries.
pub fn random_strict_upper(n: usize, seed: u64) -> OperatorMatrix {
    let g = sample_ginibre(n, seed);
    OperatorMatrix::from_fn(n, |i, j| if j > i { g[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// Two spectral clusters separated by a wide annulus: a block matrix with
/// Ginibre blocks around 0 and around `offset`, hidden by a random unitary.
pub fn clustered_matrix(n: usize, offset: C64, seed: u64) -> OperatorMatrix {
    let k = n / 2;
    let g1 = sample_ginibre(k.max(1), derived_seed(seed, 1));
    let g2 = sample_ginibre((n - k).max(1), derived_seed(seed, 2));
    let block = OperatorMatrix::from_fn(n, |i, j| {
        if i < k && j < k {
            g1[(i, j)]
        } else if i >= k && j >= k {
            let z = g2[(i - k, j - k)];
            if i == j {
                z + offset
            } else {
                z
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = random_unitary(n, derived_seed(seed, 3));
    &(&u * &block) * &u.adjoint()
}

/// Largest pairwise eigenvalue distance.
pub fn spectral_diameter(spectrum: &[C64]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in spectrum.iter().enumerate() {
        for b in &spectrum[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}
