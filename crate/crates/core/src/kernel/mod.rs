//! Dense complex linear-algebra substrate: ordered Schur decompositions, SVD,
//! resolvents and range projections of computed idempotents.

pub mod schur;
pub mod solve;
pub mod svd;

pub use schur::{ascending_modulus, eigenvalues, schur, schur_ordered, SchurForm};
pub use solve::{hpd_half_log_det, inverse, lu, solve, solve_right, LuFactors};
pub use svd::{svd, Svd};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::mat::{C64, OperatorMatrix};

/// (z I - T)^-1, guarded against z sitting on the spectrum.
///
/// The guard uses a smallest-singular-value estimate of z - T; the solve is
/// refined iteratively until the residual meets `eps_solve`.
pub fn resolvent_apply(t: &OperatorMatrix, z: C64, tol: &Tolerances) -> Result<OperatorMatrix> {
    t.check_finite()?;
    let n = t.dim();
    let a = t.resolvent_argument(z);
    let scale = t.op_norm_est().max(z.norm()).max(f64::MIN_POSITIVE);
    let threshold = tol.eps_sing_rel * scale;
    let factors = lu(&a);
    let sigma_min = factors.smallest_singular_value_est();
    if sigma_min < threshold {
        return Err(Error::ContourTouchesSpectrum {
            z,
            distance: sigma_min,
            threshold,
        });
    }
    let identity = OperatorMatrix::identity(n);
    let mut x = factors.solve_mat(&identity);
    let target = tol.eps_solve(n);
    let mut residual = (&(&a * &x) - &identity).fro_norm();
    for _ in 0..3 {
        if residual <= target {
            break;
        }
        // One step of iterative refinement squares the residual.
        let correction = factors.solve_mat(&(&identity - &(&a * &x)));
        x = &x + &correction;
        residual = (&(&a * &x) - &identity).fro_norm();
    }
    if residual > target {
        return Err(Error::SolveResidual { residual, target });
    }
    Ok(x)
}

/// Orthogonal projector onto the numerical column space of E.
///
/// The rank is the count of singular values above `rank_tol * sigma_1`; a gap
/// smaller than `rank_gap_factor` across that threshold is reported as
/// ambiguous so the caller can refine the contour.
pub fn range_projection(
    e: &OperatorMatrix,
    rank_tol: f64,
    tol: &Tolerances,
) -> Result<OperatorMatrix> {
    let n = e.dim();
    let decomposition = svd(e)?;
    let top = decomposition.values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(OperatorMatrix::zeros(n));
    }
    let threshold = rank_tol * top;
    let rank = decomposition
        .values
        .iter()
        .filter(|&&s| s > threshold)
        .count();
    if rank < n {
        let above = decomposition.values[rank - 1];
        let below = decomposition.values[rank];
        if below > 0.0 && above / below < tol.rank_gap_factor {
            return Err(Error::AmbiguousRank {
                above,
                below,
                gap_factor: tol.rank_gap_factor,
            });
        }
    }
    let cols = decomposition.u.columns(0, rank);
    Ok(OperatorMatrix::projector_from_columns(&cols, n))
}
