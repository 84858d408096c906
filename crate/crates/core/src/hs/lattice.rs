//! Lattice arithmetic on orthogonal projections: joins by orthonormalization
//! of concatenated range bases, meets by joins of complements.

use crate::error::Result;
use crate::kernel::svd;
use crate::mat::{dot, norm, C64, OperatorMatrix};

/// Orthonormal basis for the range of a Hermitian projection, taken from the
/// left singular vectors with singular value near 1.
pub fn range_basis(p: &OperatorMatrix) -> Result<Vec<Vec<C64>>> {
    let dec = svd(p)?;
    let rank = dec.values.iter().filter(|&&s| s > 0.5).count();
    Ok(dec.u.columns(0, rank))
}

/// Orthonormalizes a spanning set by modified Gram-Schmidt with
/// re-orthogonalization, dropping numerically dependent vectors.
pub fn orthonormalize(vectors: Vec<Vec<C64>>, drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for mut v in vectors {
        for _pass in 0..2 {
            for b in &basis {
                let overlap = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= bi * overlap;
                }
            }
        }
        let r = norm(&v);
        if r > drop_tol {
            for z in v.iter_mut() {
                *z /= r;
            }
            basis.push(v);
        }
    }
    basis
}

/// Join (supremum) of projections: projector onto the sum of the ranges.
pub fn join(projections: &[&OperatorMatrix]) -> Result<OperatorMatrix> {
    assert!(!projections.is_empty());
    let n = projections[0].dim();
    let mut stacked = Vec::new();
    for p in projections {
        stacked.extend(range_basis(p)?);
    }
    let basis = orthonormalize(stacked, 1e-8);
    Ok(OperatorMatrix::projector_from_columns(&basis, n))
}

/// Meet (infimum) of projections via the join of the complements.
pub fn meet(projections: &[&OperatorMatrix]) -> Result<OperatorMatrix> {
    assert!(!projections.is_empty());
    let n = projections[0].dim();
    let identity = OperatorMatrix::identity(n);
    let complements: Vec<OperatorMatrix> =
        projections.iter().map(|p| &identity - *p).collect();
    let refs: Vec<&OperatorMatrix> = complements.iter().collect();
    Ok(&identity - &join(&refs)?)
}
