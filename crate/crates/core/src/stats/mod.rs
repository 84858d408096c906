//! Measure-theoretic calculus on matrices: singular value profiles, the
//! log F-norm, Fuglede-Kadison determinants, Brown measures, the S-transform
//! and logarithmic submajorization.

pub mod grid;
pub mod measure;
pub mod profile;

pub use grid::{brown_grid, GridDensity, GridSpec, Window};
pub use measure::{phi, AtomicMeasure};
pub use profile::{log_submajorizes_profiles, SingularValueProfile, SubmajorizationReport};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernel::{schur, svd};
use crate::mat::OperatorMatrix;

/// mu(t, T): the decreasing rearrangement of the singular values as a
/// right-continuous step profile on (0, 1].
pub fn mu_profile(t: &OperatorMatrix) -> Result<SingularValueProfile> {
    Ok(SingularValueProfile::from_descending(svd(t)?.values))
}

/// |T|_log = tau(log(1 + |T|)) = (1/n) sum log(1 + s_i). Always >= 0.
pub fn log_norm(t: &OperatorMatrix) -> Result<f64> {
    Ok(mu_profile(t)?.log1p_integral())
}

/// tau(log^+(|T| / scale)) = (1/n) sum max(0, log(s_i / scale)).
pub fn log_plus_moment(t: &OperatorMatrix, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(
            "log_plus_moment requires a positive scale".into(),
        ));
    }
    let values = svd(t)?.values;
    let n = values.len() as f64;
    Ok(values
        .iter()
        .filter(|&&s| s > scale)
        .map(|&s| (s / scale).ln())
        .sum::<f64>()
        / n)
}

/// Fuglede-Kadison determinant Delta(T) = prod s_i^(1/n) = |det T|^(1/n).
///
/// Exactly 0 when any singular value falls below `eps_sing_rel` times the top
/// one: the Delta(T) = 0 regime is a clean branch, not a tiny float.
pub fn fk_determinant(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let values = svd(t)?.values;
    Ok(fk_determinant_from_singular_values(&values, tol))
}

pub fn fk_determinant_from_singular_values(values: &[f64], tol: &Tolerances) -> f64 {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0.0;
    }
    let cutoff = tol.eps_sing_rel * top;
    let n = values.len() as f64;
    let mut acc = 0.0f64;
    for &s in values {
        if s <= cutoff {
            return 0.0;
        }
        acc += s.ln();
    }
    (acc / n).exp()
}

/// Brown measure of a matrix: atoms at the eigenvalues, each of weight 1/n.
pub fn brown_measure(t: &OperatorMatrix) -> Result<AtomicMeasure> {
    Ok(AtomicMeasure::from_points(&schur(t)?.eigenvalues()))
}

/// The comparison B <<_log A on matrices, with the margin profile reported.
pub fn log_submajorizes(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    tol: &Tolerances,
) -> Result<SubmajorizationReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(log_submajorizes_profiles(
        &mu_profile(a)?,
        &mu_profile(b)?,
        tol.submajorization_slack,
    ))
}

/// S(t, T) = mu(t,T) (1 + (1/t) tau(log^+(|T| / mu(t,T)))) at t = k/n,
/// with S = 0 where mu vanishes. The output is checked to be decreasing.
pub fn s_transform(t: &OperatorMatrix) -> Result<SingularValueProfile> {
    let values = svd(t)?.values;
    let n = values.len();
    let nf = n as f64;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mu_k = values[k - 1];
        if mu_k == 0.0 {
            out.push(0.0);
            continue;
        }
        // tau(log^+(|T|/mu_k)): only singular values above mu_k contribute.
        let moment: f64 = values[..k - 1]
            .iter()
            .map(|&s| (s / mu_k).ln().max(0.0))
            .sum::<f64>()
            / nf;
        let tk = k as f64 / nf;
        out.push(mu_k * (1.0 + moment / tk));
    }
    let scale = out.first().copied().unwrap_or(0.0).max(1.0);
    for w in out.windows(2) {
        if w[1] > w[0] + 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "S-transform failed its monotonicity check: {} -> {}",
                w[0], w[1]
            )));
        }
    }
    // Rounding can leave microscopic inversions; clamp them away so the
    // profile invariant holds exactly.
    let mut prev = f64::INFINITY;
    for v in out.iter_mut() {
        if *v > prev {
            *v = prev;
        }
        prev = *v;
    }
    Ok(SingularValueProfile::from_descending(out))
}

/// (sigma_2 p)(t) = p(t/2) on (0, 1].
pub fn dilate2(p: &SingularValueProfile) -> SingularValueProfile {
    p.dilate2()
}
