//! Atomic measures on the complex plane; the Brown measure of a matrix is the
//! eigenvalue counting measure with weights 1/n.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mat::C64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<(C64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(C64, f64)>) -> Self {
        debug_assert!(atoms.iter().all(|&(_, w)| w > 0.0));
        AtomicMeasure { atoms }
    }

    /// Eigenvalue counting measure: each point carries weight 1/n.
    pub fn from_points(points: &[C64]) -> Self {
        let w = 1.0 / points.len() as f64;
        AtomicMeasure {
            atoms: points.iter().map(|&z| (z, w)).collect(),
        }
    }

    pub fn dirac(z: C64) -> Self {
        AtomicMeasure {
            atoms: vec![(z, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(C64, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    pub fn support(&self) -> Vec<C64> {
        self.atoms.iter().map(|&(z, _)| z).collect()
    }

    /// Mass inside an arbitrary membership test.
    pub fn mass_where(&self, mut member: impl FnMut(C64) -> bool) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(z, _)| member(z))
            .map(|&(_, w)| w)
            .sum()
    }

    /// integral of log|z - lambda| against the measure; -inf at an atom.
    pub fn log_potential(&self, lambda: C64) -> f64 {
        let mut acc = 0.0f64;
        for &(z, w) in &self.atoms {
            let d = (z - lambda).norm();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += w * d.ln();
        }
        acc
    }

    /// integral of z against the measure.
    pub fn mean(&self) -> C64 {
        self.atoms.iter().map(|&(z, w)| z * w).sum()
    }

    /// Push-forward under complex conjugation.
    pub fn push_conj(&self) -> Self {
        AtomicMeasure {
            atoms: self.atoms.iter().map(|&(z, w)| (z.conj(), w)).collect(),
        }
    }

    /// Push-forward under z -> 1/z; panics on an atom at 0.
    pub fn push_inverse(&self) -> Self {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|&(z, w)| {
                    assert!(z.norm() > 0.0, "push-forward of an atom at 0 under inversion");
                    (z.inv(), w)
                })
                .collect(),
        }
    }

    /// Collapses atoms that coincide within `tol` (for presentation only).
    pub fn merged(&self, tol: f64) -> Self {
        let mut out: Vec<(Complex64, f64)> = Vec::new();
        for &(z, w) in &self.atoms {
            if let Some(slot) = out.iter_mut().find(|(c, _)| (*c - z).norm() <= tol) {
                slot.1 += w;
            } else {
                out.push((z, w));
            }
        }
        AtomicMeasure { atoms: out }
    }
}

/// Phi(s, nu) = integral of z over the closed disk |z| <= s.
pub fn phi(s: f64, nu: &AtomicMeasure) -> C64 {
    assert!(s > 0.0, "phi requires s > 0");
    nu.atoms()
        .iter()
        .filter(|&&(z, _)| z.norm() <= s)
        .map(|&(z, w)| z * w)
        .sum()
}
