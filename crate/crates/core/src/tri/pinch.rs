//! Complete orthogonal flags and the block-diagonal pinching
//! S -> sum over blocks of p_k S p_k.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hs::lattice::{orthonormalize, range_basis};
use crate::kernel::eigenvalues;
use crate::mat::OperatorMatrix;
use crate::stats::{self, SubmajorizationReport};

/// Ordered complete orthogonal family of projections, stored as a unitary
/// basis plus the cumulative cut positions (last cut equals the dimension).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Flag {
    basis: OperatorMatrix,
    cuts: Vec<usize>,
}

impl Flag {
    /// Coordinate flag with the given cumulative cuts.
    pub fn coordinate(n: usize, cuts: Vec<usize>) -> Result<Self> {
        Self::from_basis(OperatorMatrix::identity(n), cuts)
    }

    pub fn from_basis(basis: OperatorMatrix, cuts: Vec<usize>) -> Result<Self> {
        let n = basis.dim();
        if cuts.is_empty() || *cuts.last().unwrap() != n {
            return Err(Error::NonOrthogonalFlag {
                reason: format!("cuts must end at the dimension {n}, got {cuts:?}"),
            });
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts[0] == 0 {
            return Err(Error::NonOrthogonalFlag {
                reason: format!("cuts must be strictly increasing and positive, got {cuts:?}"),
            });
        }
        let unitarity = (&basis.adjoint() * &basis).dist_to_identity();
        if unitarity > 1e-10 * n as f64 {
            return Err(Error::NonOrthogonalFlag {
                reason: format!("basis is not unitary, defect {unitarity:.3e}"),
            });
        }
        Ok(Flag { basis, cuts })
    }

    /// Validates raw projection matrices as a mutually orthogonal complete
    /// family and assembles the flag from their range bases.
    pub fn from_projections(projections: &[OperatorMatrix], tol: &Tolerances) -> Result<Self> {
        if projections.is_empty() {
            return Err(Error::NonOrthogonalFlag {
                reason: "empty family".into(),
            });
        }
        let n = projections[0].dim();
        let budget = tol.eps_proj(n).max(1e-10);
        let mut sum = OperatorMatrix::zeros(n);
        for (i, p) in projections.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::NonOrthogonalFlag {
                    reason: "dimension mismatch in the family".into(),
                });
            }
            if !p.is_hermitian(budget) {
                return Err(Error::NonOrthogonalFlag {
                    reason: format!("projection {i} is not Hermitian"),
                });
            }
            if (&(p * p) - p).fro_norm() > budget {
                return Err(Error::NonOrthogonalFlag {
                    reason: format!("projection {i} is not idempotent"),
                });
            }
            for (j, q) in projections.iter().enumerate().take(i) {
                if (p * q).fro_norm() > budget {
                    return Err(Error::NonOrthogonalFlag {
                        reason: format!("projections {j} and {i} are not orthogonal"),
                    });
                }
            }
            sum = &sum + p;
        }
        if sum.dist_to_identity() > budget {
            return Err(Error::NonOrthogonalFlag {
                reason: "family does not sum to the identity".into(),
            });
        }
        let mut cols = Vec::with_capacity(n);
        let mut cuts = Vec::with_capacity(projections.len());
        for p in projections {
            cols.extend(range_basis(p)?);
            cuts.push(cols.len());
        }
        if cols.len() != n {
            return Err(Error::NonOrthogonalFlag {
                reason: "range bases do not fill the space".into(),
            });
        }
        let cols = orthonormalize(cols, 1e-8);
        if cols.len() != n {
            return Err(Error::NonOrthogonalFlag {
                reason: "range bases are numerically dependent".into(),
            });
        }
        let basis = OperatorMatrix::from_fn(n, |i, j| cols[j][i]);
        Flag::from_basis(basis, cuts)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn blocks(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn basis(&self) -> &OperatorMatrix {
        &self.basis
    }

    /// Minimal projection onto block k.
    pub fn block_projection(&self, k: usize) -> OperatorMatrix {
        let lo = if k == 0 { 0 } else { self.cuts[k - 1] };
        let hi = self.cuts[k];
        let cols = self.basis.columns(lo, hi);
        OperatorMatrix::projector_from_columns(&cols, self.dim())
    }

    /// Cumulative projection q_k = p_1 + ... + p_k.
    pub fn cumulative_projection(&self, k: usize) -> OperatorMatrix {
        let hi = if k == 0 { 0 } else { self.cuts[k - 1] };
        let cols = self.basis.columns(0, hi);
        OperatorMatrix::projector_from_columns(&cols, self.dim())
    }

    fn block_range(&self, k: usize) -> (usize, usize) {
        let lo = if k == 0 { 0 } else { self.cuts[k - 1] };
        (lo, self.cuts[k])
    }
}

/// Exp along the flag: sum of p_k S p_k, computed in the flag basis so the
/// orthogonality structure is exact. Idempotent as a map.
pub fn pinch(s: &OperatorMatrix, flag: &Flag) -> OperatorMatrix {
    let n = s.dim();
    assert_eq!(n, flag.dim(), "flag dimension mismatch");
    let u = flag.basis();
    let in_basis = &(&u.adjoint() * s) * u;
    let mut blocked = OperatorMatrix::zeros(n);
    for k in 0..flag.blocks() {
        let (lo, hi) = flag.block_range(k);
        for i in lo..hi {
            for j in lo..hi {
                blocked[(i, j)] = in_basis[(i, j)];
            }
        }
    }
    &(u * &blocked) * &u.adjoint()
}

/// What an invariant-flag pinch preserves.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PinchReport {
    /// Delta(pinch(T)) / Delta(T); `None` when both determinants vanish
    /// (reported consistent rather than 0/0).
    pub delta_ratio: Option<f64>,
    pub delta_consistent: bool,
    /// Largest matched distance between the eigenvalue multisets.
    pub brown_match_distance: f64,
    pub brown_match: bool,
    /// pinch(T) <<_log T; holds without any invariance hypothesis.
    pub submajorization: SubmajorizationReport,
}

/// Checks the cumulative flag projections are T-invariant, then reports the
/// determinant ratio, eigenvalue match and submajorization of the pinch.
pub fn pinch_preserves(t: &OperatorMatrix, flag: &Flag, tol: &Tolerances) -> Result<PinchReport> {
    let n = t.dim();
    let threshold = tol.eps_inv(n) * t.fro_norm().max(1.0);
    for k in 1..flag.blocks() {
        let q = flag.cumulative_projection(k);
        let residual = (&(&(&OperatorMatrix::identity(n) - &q) * t) * &q).fro_norm();
        if residual > threshold {
            return Err(Error::InvarianceViolation {
                k,
                residual,
                threshold,
            });
        }
    }
    let pinched = pinch(t, flag);
    let delta_t = stats::fk_determinant(t, tol)?;
    let delta_p = stats::fk_determinant(&pinched, tol)?;
    let (delta_ratio, delta_consistent) = if delta_t == 0.0 && delta_p == 0.0 {
        (None, true)
    } else if delta_t == 0.0 || delta_p == 0.0 {
        (None, false)
    } else {
        let ratio = delta_p / delta_t;
        (Some(ratio), (ratio - 1.0).abs() <= 1e-8)
    };

    let eig_t = eigenvalues(t)?;
    let eig_p = eigenvalues(&pinched)?;
    let scale = eig_t.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let brown_match_distance = crate::assign::multiset_match_distance(&eig_t, &eig_p);
    let brown_match = brown_match_distance <= 1e-8 * scale;

    let submajorization = stats::log_submajorizes(t, &pinched, tol)?;
    Ok(PinchReport {
        delta_ratio,
        delta_consistent,
        brown_match_distance,
        brown_match,
        submajorization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{C64, ONE, ZERO};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn full_coordinate_flag_extracts_the_diagonal() {
        let t = OperatorMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap();
        let flag = Flag::coordinate(2, vec![1, 2]).unwrap();
        let pinched = pinch(&t, &flag);
        let expected = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0)]);
        assert!((&pinched - &expected).fro_norm() < 1e-14);
        // Idempotent as a map.
        assert!((&pinch(&pinched, &flag) - &pinched).fro_norm() < 1e-14);
    }

    #[test]
    fn single_block_flag_is_the_identity_map() {
        let t = OperatorMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let flag = Flag::coordinate(2, vec![2]).unwrap();
        assert!((&pinch(&t, &flag) - &t).fro_norm() < 1e-14);
    }

    #[test]
    fn pinch_preserves_on_triangular_example() {
        let t = OperatorMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap();
        let flag = Flag::coordinate(2, vec![1, 2]).unwrap();
        let report = pinch_preserves(&t, &flag, &tols()).unwrap();
        assert!(report.delta_consistent);
        assert!((report.delta_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(report.brown_match);
        assert!(report.submajorization.holds);
    }

    #[test]
    fn invariance_violation_names_the_cut() {
        // e1 is not invariant for a lower-triangular matrix.
        let t = OperatorMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 3.0]]).unwrap();
        let flag = Flag::coordinate(2, vec![1, 2]).unwrap();
        let err = pinch_preserves(&t, &flag, &tols()).unwrap_err();
        match err {
            Error::InvarianceViolation { k, .. } => assert_eq!(k, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn triangular_input_submajorizes_under_coordinate_flags() {
        // Coordinate flags are invariant for triangular matrices (up to basis
        // reversal), so the pinch is submajorized.
        let t = OperatorMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 3.0]]).unwrap();
        let flag = Flag::coordinate(2, vec![1, 2]).unwrap();
        let pinched = pinch(&t, &flag);
        let report = stats::log_submajorizes(&t, &pinched, &tols()).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn from_projections_validates_the_family() {
        let tol = tols();
        let p1 = OperatorMatrix::from_diag(&[ONE, ZERO]);
        let p2 = OperatorMatrix::from_diag(&[ZERO, ONE]);
        let flag = Flag::from_projections(&[p1.clone(), p2], &tol).unwrap();
        assert_eq!(flag.blocks(), 2);
        assert!((&flag.block_projection(0) - &p1).fro_norm() < 1e-12);

        // Incomplete family rejected.
        let err = Flag::from_projections(&[p1.clone()], &tol).unwrap_err();
        assert!(matches!(err, Error::NonOrthogonalFlag { .. }));

        // Non-orthogonal family rejected.
        let half = C64::new(0.5, 0.0);
        let skew = OperatorMatrix::from_rows(vec![vec![half, half], vec![half, half]]).unwrap();
        let err = Flag::from_projections(&[p1, skew], &tol).unwrap_err();
        assert!(matches!(err, Error::NonOrthogonalFlag { .. }));
    }
}
