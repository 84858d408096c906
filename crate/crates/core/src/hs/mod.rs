//! Haagerup-Schultz spectral projections: the exact ordered-Schur oracle for
//! arbitrary regions, the contour-integral idempotent with its range
//! projection, and the property suite (conformal transport, adjoint duality,
//! closed-set joins and meets).

pub mod contour;
pub mod lattice;
pub mod moebius;
pub mod region;

pub use contour::{
    contour_idempotent, contour_reparameterize_check, riemann_product_identity, ContourIdempotent,
    ContourSpec, Reparameterization, RiemannProductReport,
};
pub use moebius::Moebius;
pub use region::Region;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernel::{range_projection, schur, SchurForm};
use crate::mat::{C64, OperatorMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    Oracle,
    Contour,
}

/// Hermitian idempotent attached to the region it captures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralProjection {
    pub matrix: OperatorMatrix,
    pub region: Region,
    pub normalized_rank: f64,
    pub method: ProjectionMethod,
}

/// Residuals of the defining properties, for verification reporting.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub hermiticity: f64,
    pub idempotency: f64,
    /// |(1 - P) T P| / max(1, |T|): T-invariance of the range.
    pub invariance: f64,
}

impl SpectralProjection {
    pub fn diagnostics(&self, t: &OperatorMatrix) -> ProjectionDiagnostics {
        let p = &self.matrix;
        let n = t.dim();
        let identity = OperatorMatrix::identity(n);
        let q = &identity - p;
        ProjectionDiagnostics {
            hermiticity: (p - &p.adjoint()).fro_norm(),
            idempotency: (&(p * p) - p).fro_norm(),
            invariance: (&q * &(t * p)).fro_norm() / t.fro_norm().max(1.0),
        }
    }

    pub fn rank(&self, n: usize) -> usize {
        (self.normalized_rank * n as f64).round() as usize
    }
}

/// Largest pairwise distance between eigenvalues.
fn spectral_diameter(spectrum: &[C64]) -> f64 {
    let mut diam = 0.0f64;
    for (i, &a) in spectrum.iter().enumerate() {
        for &b in &spectrum[i + 1..] {
            diam = diam.max((a - b).norm());
        }
    }
    diam
}

/// Classification threshold: eigenvalues nearer than this to a boundary abort.
fn classify_threshold(spectrum: &[C64], tol: &Tolerances) -> f64 {
    let diam = spectral_diameter(spectrum);
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    tol.classify_tol_rel * diam.max(scale * 1e-3)
}

fn check_classifiable(spectrum: &[C64], region: &Region, tol: &Tolerances) -> Result<()> {
    let threshold = classify_threshold(spectrum, tol);
    let mut offenders = Vec::new();
    for &ev in spectrum {
        if let Some(d) = region.boundary_distance(ev) {
            if d < threshold {
                offenders.push((ev, d));
            }
        }
    }
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(Error::BoundaryAmbiguous { offenders })
    }
}

/// Ordered-Schur core of the oracle: members of the region come first, stably.
fn classified_schur(
    t: &OperatorMatrix,
    region: &Region,
    tol: &Tolerances,
) -> Result<(SchurForm, usize)> {
    region.validate()?;
    let mut form = schur(t)?;
    check_classifiable(&form.eigenvalues(), region, tol)?;
    form.reorder_by(&mut |a, b| {
        let ma = region.contains(*a);
        let mb = region.contains(*b);
        mb.cmp(&ma)
    });
    let inside = form
        .eigenvalues()
        .iter()
        .filter(|&&ev| region.contains(ev))
        .count();
    Ok((form, inside))
}

/// Exact Haagerup-Schultz projection: the orthogonal projector onto the span
/// of the leading Schur vectors once the region's eigenvalues are ordered
/// first. tau(P) equals the Brown-measure mass of the region exactly, and the
/// compressions split the spectrum as a multiset partition.
pub fn hs_oracle(
    t: &OperatorMatrix,
    region: &Region,
    tol: &Tolerances,
) -> Result<SpectralProjection> {
    let n = t.dim();
    let (form, inside) = classified_schur(t, region, tol)?;
    let matrix = form.leading_projector(inside);
    Ok(SpectralProjection {
        matrix,
        region: region.clone(),
        normalized_rank: inside as f64 / n as f64,
        method: ProjectionMethod::Oracle,
    })
}

/// Contour route: range projection of the Riemann-sum idempotent for a disk.
/// Converges to the oracle as the node count grows; the two routes stay
/// independent so they can check each other.
pub fn hs_contour(
    t: &OperatorMatrix,
    spec: &ContourSpec,
    tol: &Tolerances,
) -> Result<SpectralProjection> {
    let n = t.dim();
    let idempotent = contour_idempotent(t, spec, tol)?;
    // A nonzero idempotent has operator norm >= 1; anything far below that is
    // the Riemann-sum noise of an empty disk.
    let matrix = if idempotent.matrix.op_norm_est() < 0.5 {
        OperatorMatrix::zeros(n)
    } else {
        range_projection(&idempotent.matrix, tol.rank_tol, tol)?
    };
    let rank = matrix.trace().re.round().max(0.0) as usize;
    Ok(SpectralProjection {
        matrix,
        region: Region::disk(spec.center, spec.radius),
        normalized_rank: rank as f64 / n as f64,
        method: ProjectionMethod::Contour,
    })
}

/// Outcome of a two-route projection comparison.
#[derive(Clone, Debug)]
pub struct TransportReport {
    pub projection: SpectralProjection,
    pub deviation: f64,
}

/// P(T, B) computed through gamma: the projection for (gamma(T), gamma(B))
/// must equal the direct oracle. Errors if the deviation exceeds
/// `proj_agree_tol`.
pub fn moebius_transport(
    t: &OperatorMatrix,
    region: &Region,
    gamma: &Moebius,
    tol: &Tolerances,
) -> Result<TransportReport> {
    let direct = hs_oracle(t, region, tol)?;
    let mapped_t = gamma.apply_matrix(t)?;
    let mapped_region = gamma.map_region(region)?;
    let transported = hs_oracle(&mapped_t, &mapped_region, tol)?;
    let deviation = (&transported.matrix - &direct.matrix).fro_norm();
    if deviation > tol.proj_agree_tol {
        return Err(Error::InvalidArgument(format!(
            "conformal transport disagreed with the direct projection: {deviation:.3e}"
        )));
    }
    Ok(TransportReport {
        projection: SpectralProjection {
            matrix: transported.matrix,
            region: region.clone(),
            normalized_rank: transported.normalized_rank,
            method: ProjectionMethod::Oracle,
        },
        deviation,
    })
}

/// P(T, complement of B) via 1 - P(T*, conj B), checked against the direct
/// oracle on the complement.
pub fn adjoint_complement(
    t: &OperatorMatrix,
    disk: &Region,
    tol: &Tolerances,
) -> Result<TransportReport> {
    let (center, radius) = disk.as_disk().ok_or_else(|| {
        Error::InvalidArgument("adjoint complement expects a plain disk".into())
    })?;
    let conj_disk = Region::disk(center.conj(), radius);
    let adjoint_projection = hs_oracle(&t.adjoint(), &conj_disk, tol)?;
    let n = t.dim();
    let via_adjoint = &OperatorMatrix::identity(n) - &adjoint_projection.matrix;
    let complement_region = Region::disk_complement(center, radius);
    let direct = hs_oracle(t, &complement_region, tol)?;
    let deviation = (&via_adjoint - &direct.matrix).fro_norm();
    if deviation > tol.proj_agree_tol {
        return Err(Error::InvalidArgument(format!(
            "adjoint duality disagreed with the direct projection: {deviation:.3e}"
        )));
    }
    Ok(TransportReport {
        projection: SpectralProjection {
            matrix: via_adjoint,
            region: complement_region,
            normalized_rank: 1.0 - adjoint_projection.normalized_rank,
            method: ProjectionMethod::Oracle,
        },
        deviation,
    })
}

/// Result of the closed-set construction: the lattice routes and the oracle.
#[derive(Clone, Debug)]
pub struct ClosedSetReport {
    pub projection: SpectralProjection,
    /// |join - meet|.
    pub join_meet_gap: f64,
    /// max(|join - oracle|, |meet - oracle|).
    pub oracle_gap: f64,
}

fn is_disk_expression(region: &Region) -> bool {
    match region {
        Region::Disk { .. } | Region::DiskComplement { .. } => true,
        Region::Union(parts) | Region::Intersection(parts) => {
            parts.iter().all(is_disk_expression)
        }
        Region::Complement(inner) => is_disk_expression(inner),
        Region::HalfPlane { .. } | Region::Predicate(_) => false,
    }
}

/// Picks a disk radius around `center` whose boundary stays clear of every
/// eigenvalue; starts at half the region boundary distance.
fn safe_radius(center: C64, start: f64, spectrum: &[C64], clearance: f64) -> f64 {
    let mut r = start;
    'outer: for _ in 0..60 {
        for &ev in spectrum {
            if ((ev - center).norm() - r).abs() < clearance {
                r *= 0.7;
                continue 'outer;
            }
        }
        return r;
    }
    r
}

/// Closed region given as union/intersection data of disks, realized twice:
/// as a join of inner-disk projections and as a meet of complement
/// projections around the outside eigenvalues. Both must agree with the
/// membership oracle.
pub fn hs_closed_set(
    t: &OperatorMatrix,
    region: &Region,
    tol: &Tolerances,
) -> Result<ClosedSetReport> {
    if !is_disk_expression(region) {
        return Err(Error::InvalidArgument(format!(
            "closed-set construction expects union/intersection data of disks, got {}",
            region.kind()
        )));
    }
    let n = t.dim();
    let oracle = hs_oracle(t, region, tol)?;
    let spectrum = schur(t)?.eigenvalues();
    let clearance = classify_threshold(&spectrum, tol).max(1e-12);

    let mut inner_projections: Vec<OperatorMatrix> = Vec::new();
    let mut outer_projections: Vec<OperatorMatrix> = Vec::new();
    for &ev in &spectrum {
        let dist = region
            .boundary_distance(ev)
            .expect("disk expressions have boundaries");
        let radius = safe_radius(ev, 0.5 * dist, &spectrum, clearance);
        if region.contains(ev) {
            let disk = Region::disk(ev, radius);
            inner_projections.push(hs_oracle(t, &disk, tol)?.matrix);
        } else {
            let around = Region::disk_complement(ev, radius);
            outer_projections.push(hs_oracle(t, &around, tol)?.matrix);
        }
    }

    let join = if inner_projections.is_empty() {
        OperatorMatrix::zeros(n)
    } else {
        let refs: Vec<&OperatorMatrix> = inner_projections.iter().collect();
        lattice::join(&refs)?
    };
    let meet = if outer_projections.is_empty() {
        OperatorMatrix::identity(n)
    } else {
        let refs: Vec<&OperatorMatrix> = outer_projections.iter().collect();
        lattice::meet(&refs)?
    };

    let join_meet_gap = (&join - &meet).fro_norm();
    let oracle_gap = (&join - &oracle.matrix)
        .fro_norm()
        .max((&meet - &oracle.matrix).fro_norm());
    if join_meet_gap > tol.proj_agree_tol || oracle_gap > tol.proj_agree_tol {
        return Err(Error::InvalidArgument(format!(
            "closed-set join/meet disagreement: join-meet {join_meet_gap:.3e}, \
             oracle {oracle_gap:.3e}"
        )));
    }
    Ok(ClosedSetReport {
        projection: oracle,
        join_meet_gap,
        oracle_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{ONE, ZERO};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn triangular_example() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap()
    }

    #[test]
    fn oracle_on_diagonal() {
        let t = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0)]);
        let p = hs_oracle(&t, &Region::disk(ONE, 0.5), &tols()).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO]);
        assert!((&p.matrix - &expected).fro_norm() < 1e-12);
        assert_eq!(p.normalized_rank, 0.5);
    }

    #[test]
    fn oracle_on_triangular_invariant_line() {
        let t = triangular_example();
        let tol = tols();
        // Eigenvalue 1 owns the invariant line e1.
        let p = hs_oracle(&t, &Region::disk(ONE, 0.5), &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO]);
        assert!((&p.matrix - &expected).fro_norm() < 1e-12);

        // Eigenvalue 3 owns the line spanned by (1, 2)/sqrt 5.
        let p = hs_oracle(&t, &Region::disk(C64::new(3.0, 0.0), 0.5), &tol).unwrap();
        let expected = OperatorMatrix::from_real_rows(&[&[0.2, 0.4], &[0.4, 0.8]]).unwrap();
        assert!((&p.matrix - &expected).fro_norm() < 1e-10);
        let d = p.diagnostics(&t);
        assert!(d.hermiticity < 1e-12 && d.idempotency < 1e-12 && d.invariance < 1e-10);
    }

    #[test]
    fn oracle_rejects_boundary_ambiguity() {
        let t = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0)]);
        let err = hs_oracle(&t, &Region::disk(ZERO, 1.0), &tols()).unwrap_err();
        assert!(matches!(err, Error::BoundaryAmbiguous { .. }));
    }

    #[test]
    fn predicate_region_classifies_without_boundary() {
        let t = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0), C64::new(0.0, 2.0)]);
        let p = hs_oracle(&t, &Region::predicate(|z| z.re > 2.0), &tols()).unwrap();
        assert!((p.normalized_rank - 1.0 / 3.0).abs() < 1e-15);
        let expected = OperatorMatrix::from_diag(&[ZERO, ONE, ZERO]);
        assert!((&p.matrix - &expected).fro_norm() < 1e-12);
    }

    #[test]
    fn contour_matches_oracle_on_disk() {
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[ZERO, C64::new(2.0, 0.0)]);
        let spec = ContourSpec::new(ZERO, 1.0, 256, 0.2);
        let p = hs_contour(&t, &spec, &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO]);
        assert!((&p.matrix - &expected).fro_norm() < 1e-8);

        let t = triangular_example();
        let spec = ContourSpec::new(C64::new(3.0, 0.0), 1.0, 512, 0.2);
        let p = hs_contour(&t, &spec, &tol).unwrap();
        let oracle = hs_oracle(&t, &Region::disk(C64::new(3.0, 0.0), 1.0), &tol).unwrap();
        assert!((&p.matrix - &oracle.matrix).fro_norm() < 1e-6);
    }

    #[test]
    fn contour_enclosing_everything_is_identity() {
        let t = triangular_example();
        let spec = ContourSpec::new(C64::new(2.0, 0.0), 4.0, 128, 0.5);
        let p = hs_contour(&t, &spec, &tols()).unwrap();
        assert!(p.matrix.dist_to_identity() < 1e-9);
        assert_eq!(p.rank(2), 2);
    }

    #[test]
    fn moebius_affine_transport_agrees() {
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[ZERO, C64::new(2.0, 0.0)]);
        let gamma = Moebius::affine(C64::new(2.0, 0.0), ONE).unwrap();
        let report = moebius_transport(&t, &Region::disk(ZERO, 1.0), &gamma, &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO]);
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
        assert!(report.deviation <= tol.proj_agree_tol);

        let id = Moebius::identity();
        let report = moebius_transport(&t, &Region::disk(ZERO, 1.0), &id, &tol).unwrap();
        assert_eq!(report.deviation, 0.0);
    }

    #[test]
    fn inversion_realizes_disk_complement() {
        // P(T, complement of unit disk) = P(T^-1, unit disk) on diagonals.
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[C64::new(0.5, 0.0), C64::new(4.0, 0.0)]);
        let gamma = Moebius::inversion();
        let report =
            moebius_transport(&t, &Region::disk_complement(ZERO, 1.0), &gamma, &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ZERO, ONE]);
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
    }

    #[test]
    fn adjoint_complement_on_triangular() {
        let tol = tols();
        let t = triangular_example();
        let report = adjoint_complement(&t, &Region::disk(ONE, 0.5), &tol).unwrap();
        let expected = OperatorMatrix::from_real_rows(&[&[0.2, 0.4], &[0.4, 0.8]]).unwrap();
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
        assert!(report.deviation <= tol.proj_agree_tol);

        // Conjugation moves i to -i: the complement projector is diag(0, 1).
        let t = OperatorMatrix::from_diag(&[C64::new(0.0, 1.0), C64::new(2.0, 0.0)]);
        let report = adjoint_complement(&t, &Region::disk(C64::new(0.0, 1.0), 0.5), &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ZERO, ONE]);
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
    }

    #[test]
    fn closed_set_single_disk_reduces_to_oracle() {
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0)]);
        let report = hs_closed_set(&t, &Region::disk(ONE, 0.5), &tol).unwrap();
        assert!(report.join_meet_gap <= tol.proj_agree_tol);
        assert!(report.oracle_gap <= tol.proj_agree_tol);
    }

    #[test]
    fn closed_set_union_of_disjoint_disks() {
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[
            ZERO,
            C64::new(4.0, 0.0),
            C64::new(0.0, 4.0),
            C64::new(4.0, 4.0),
        ]);
        let region = Region::Union(vec![
            Region::disk(ZERO, 1.0),
            Region::disk(C64::new(4.0, 0.0), 1.0),
        ]);
        let report = hs_closed_set(&t, &region, &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ONE, ZERO, ZERO]);
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
        assert!(report.join_meet_gap <= 1e-9);
    }

    #[test]
    fn closed_set_annulus() {
        let tol = tols();
        let t = OperatorMatrix::from_diag(&[
            C64::new(1.5, 0.0),
            C64::new(0.1, 0.0),
            C64::new(3.0, 0.0),
        ]);
        let annulus = Region::Intersection(vec![
            Region::disk(ZERO, 2.0),
            Region::disk_complement(ZERO, 1.0),
        ]);
        let report = hs_closed_set(&t, &annulus, &tol).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO, ZERO]);
        assert!((&report.projection.matrix - &expected).fro_norm() < 1e-10);
        assert!(report.join_meet_gap <= 1e-9);
        assert!(report.oracle_gap <= 1e-9);
    }
}
