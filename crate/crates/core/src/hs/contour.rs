//! Riemann-sum evaluation of the Riesz idempotent
//! E(T, B) = (1/2 pi i) contour-integral of (z - T)^-1 over the disk boundary.

use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernel::{eigenvalues, resolvent_apply};
use crate::mat::{C64, OperatorMatrix};

/// Disk boundary sampled at uniformly spaced angles.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
    /// Minimal allowed distance from any node to the spectrum.
    pub margin: f64,
}

impl ContourSpec {
    pub fn new(center: C64, radius: f64, nodes: usize, margin: f64) -> Self {
        ContourSpec {
            center,
            radius,
            nodes,
            margin,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::InvalidArgument(format!(
                "contour needs at least 8 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.margin > 0.0) {
            return Err(Error::InvalidArgument(
                "contour margin must be positive".into(),
            ));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(
                "contour radius must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    pub fn node(&self, k: usize) -> C64 {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / (self.nodes as f64);
        self.center + C64::from_polar(self.radius, angle)
    }
}

/// Riemann-sum idempotent plus its convergence diagnostic.
#[derive(Clone, Debug)]
pub struct ContourIdempotent {
    pub matrix: OperatorMatrix,
    /// |E^2 - E| in the Frobenius norm.
    pub idempotency_defect: f64,
}

fn check_margin(t: &OperatorMatrix, spec: &ContourSpec) -> Result<()> {
    let spectrum = eigenvalues(t)?;
    for k in 0..spec.nodes {
        let z = spec.node(k);
        let distance = spectrum
            .iter()
            .map(|&ev| (ev - z).norm())
            .fold(f64::INFINITY, f64::min);
        if distance < spec.margin {
            return Err(Error::ContourTouchesSpectrum {
                z,
                distance,
                threshold: spec.margin,
            });
        }
    }
    Ok(())
}

/// Fixed-structure pairwise sum so parallel evaluation reduces
/// deterministically regardless of thread count.
fn tree_sum(mut terms: Vec<OperatorMatrix>) -> OperatorMatrix {
    assert!(!terms.is_empty());
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut iter = terms.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// E_N = (1/N) sum over nodes of (zeta_k - center) (zeta_k - T)^-1.
pub fn contour_idempotent(
    t: &OperatorMatrix,
    spec: &ContourSpec,
    tol: &Tolerances,
) -> Result<ContourIdempotent> {
    spec.validate()?;
    check_margin(t, spec)?;
    let terms: Vec<OperatorMatrix> = (0..spec.nodes)
        .into_par_iter()
        .map(|k| {
            let zeta = spec.node(k);
            let resolvent = resolvent_apply(t, zeta, tol)?;
            Ok(resolvent.scale(zeta - spec.center))
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = tree_sum(terms).scale(C64::new(1.0 / spec.nodes as f64, 0.0));
    let defect = (&(&matrix * &matrix) - &matrix).fro_norm();
    Ok(ContourIdempotent {
        matrix,
        idempotency_defect: defect,
    })
}

/// Smooth increasing bijection of [0, 1] with its derivative.
pub struct Reparameterization<'a> {
    pub map: &'a (dyn Fn(f64) -> f64 + Sync),
    pub derivative: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl Reparameterization<'_> {
    fn validate(&self, nodes: usize) -> Result<()> {
        let f0 = (self.map)(0.0);
        let f1 = (self.map)(1.0);
        if f0.abs() > 1e-12 || (f1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "reparameterization must fix the endpoints, got {f0} and {f1}"
            )));
        }
        let mut prev = 0.0;
        for k in 1..=nodes.min(64) {
            let s = k as f64 / nodes.min(64) as f64;
            let v = (self.map)(s);
            if v < prev - 1e-12 {
                return Err(Error::InvalidArgument(
                    "reparameterization must be increasing".into(),
                ));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Compares the uniform Riemann sum against the change-of-variables sum
/// (1/N) sum f(gamma(k/N)) gamma'(k/N); returns the Frobenius deviation.
pub fn contour_reparameterize_check(
    t: &OperatorMatrix,
    spec: &ContourSpec,
    gamma: &Reparameterization<'_>,
    tol: &Tolerances,
) -> Result<f64> {
    spec.validate()?;
    gamma.validate(spec.nodes)?;
    let uniform = contour_idempotent(t, spec, tol)?.matrix;

    let two_pi = 2.0 * std::f64::consts::PI;
    // Spectrum guard on the reparameterized nodes as well.
    let spectrum = eigenvalues(t)?;
    let terms: Vec<OperatorMatrix> = (0..spec.nodes)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / spec.nodes as f64;
            let u = (gamma.map)(s);
            let weight = (gamma.derivative)(s);
            let zeta = spec.center + C64::from_polar(spec.radius, two_pi * u);
            let distance = spectrum
                .iter()
                .map(|&ev| (ev - zeta).norm())
                .fold(f64::INFINITY, f64::min);
            if distance < spec.margin {
                return Err(Error::ContourTouchesSpectrum {
                    z: zeta,
                    distance,
                    threshold: spec.margin,
                });
            }
            let resolvent = resolvent_apply(t, zeta, tol)?;
            Ok(resolvent.scale((zeta - spec.center) * weight))
        })
        .collect::<Result<Vec<_>>>()?;
    let reparameterized = tree_sum(terms).scale(C64::new(1.0 / spec.nodes as f64, 0.0));
    Ok((&uniform - &reparameterized).fro_norm())
}

/// Outcome of the exact algebraic identity between the Riemann sums on the
/// circles |z| = r and |z| = 1:
/// E_N F_N = (1/(1-r^N)) E_N - (r^N/(1-r^N)) F_N = F_N E_N, for every N.
#[derive(Clone, Debug)]
pub struct RiemannProductReport {
    pub residual: f64,
    /// Conditioning proxy: largest node-resolvent norm times max(1, |T|).
    pub cond: f64,
}

pub fn riemann_product_identity(
    t: &OperatorMatrix,
    r: f64,
    nodes: usize,
    tol: &Tolerances,
) -> Result<RiemannProductReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "inner radius must lie in (0, 1), got {r}"
        )));
    }
    let origin = C64::new(0.0, 0.0);
    let margin = tol.eps_sing_rel.sqrt() * (1.0 + t.op_norm_est());
    let inner = ContourSpec::new(origin, r, nodes, margin.min(r * 0.5));
    let outer = ContourSpec::new(origin, 1.0, nodes, margin.min(0.5));
    let e = contour_idempotent(t, &inner, tol)?;
    let f = contour_idempotent(t, &outer, tol)?;

    let cond_terms: Vec<f64> = (0..nodes)
        .map(|k| {
            [inner.node(k), outer.node(k)]
                .iter()
                .map(|&z| {
                    // Resolvent norms were already validated; estimate cheaply.
                    let a = t.resolvent_argument(z);
                    let factors = crate::kernel::lu(&a);
                    let sigma = factors.smallest_singular_value_est();
                    if sigma == 0.0 {
                        f64::INFINITY
                    } else {
                        1.0 / sigma
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let cond = cond_terms.into_iter().fold(0.0, f64::max) * t.fro_norm().max(1.0);

    let rn = r.powi(nodes as i32);
    let alpha = 1.0 / (1.0 - rn);
    let beta = rn / (1.0 - rn);
    let ef = &e.matrix * &f.matrix;
    let fe = &f.matrix * &e.matrix;
    let combo = &e.matrix.scale(C64::new(alpha, 0.0)) - &f.matrix.scale(C64::new(beta, 0.0));
    let residual = (&ef - &combo).fro_norm().max((&ef - &fe).fro_norm());
    Ok(RiemannProductReport { residual, cond })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{ONE, ZERO};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn scalar_residues_on_diagonal() {
        let t = OperatorMatrix::from_diag(&[ZERO, C64::new(2.0, 0.0)]);
        let spec = ContourSpec::new(ZERO, 1.0, 256, 0.2);
        let e = contour_idempotent(&t, &spec, &tols()).unwrap();
        let expected = OperatorMatrix::from_diag(&[ONE, ZERO]);
        assert!((&e.matrix - &expected).fro_norm() <= 1e-10);
        assert!(e.idempotency_defect <= 1e-10);
    }

    #[test]
    fn full_and_empty_enclosures() {
        let t = OperatorMatrix::zeros(2);
        let spec = ContourSpec::new(ZERO, 1.0, 64, 0.5);
        let e = contour_idempotent(&t, &spec, &tols()).unwrap();
        assert!(e.matrix.dist_to_identity() <= 1e-12);

        let t = OperatorMatrix::from_diag(&[C64::new(2.0, 0.0)]);
        let e = contour_idempotent(&t, &spec, &tols()).unwrap();
        assert!(e.matrix.fro_norm() <= 1e-12);
    }

    #[test]
    fn node_on_spectrum_rejected() {
        let t = OperatorMatrix::from_diag(&[ONE, C64::new(3.0, 0.0)]);
        let spec = ContourSpec::new(ZERO, 1.0, 64, 0.05);
        let err = contour_idempotent(&t, &spec, &tols()).unwrap_err();
        assert!(matches!(err, Error::ContourTouchesSpectrum { .. }));
    }

    #[test]
    fn too_few_nodes_rejected() {
        let t = OperatorMatrix::zeros(2);
        let spec = ContourSpec::new(ZERO, 1.0, 4, 0.5);
        assert!(contour_idempotent(&t, &spec, &tols()).is_err());
    }

    #[test]
    fn identity_reparameterization_is_exact() {
        let t = OperatorMatrix::from_diag(&[ZERO, C64::new(2.0, 0.0)]);
        let spec = ContourSpec::new(ZERO, 1.0, 64, 0.2);
        let id = Reparameterization {
            map: &|s| s,
            derivative: &|_| 1.0,
        };
        let dev = contour_reparameterize_check(&t, &spec, &id, &tols()).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn square_map_deviation_shrinks_first_order() {
        let t = OperatorMatrix::from_diag(&[ZERO, C64::new(2.0, 0.0)]);
        let square = Reparameterization {
            map: &|s| s * s,
            derivative: &|s| 2.0 * s,
        };
        let mut prev = f64::INFINITY;
        for nodes in [128, 256, 512] {
            let spec = ContourSpec::new(ZERO, 1.0, nodes, 0.2);
            let dev = contour_reparameterize_check(&t, &spec, &square, &tols()).unwrap();
            assert!(dev < prev);
            let ratio = prev / dev;
            if prev.is_finite() {
                assert!(
                    (1.5..3.0).contains(&ratio),
                    "halving ratio {ratio} at {nodes} nodes"
                );
            }
            prev = dev;
        }
    }

    #[test]
    fn riemann_identity_exact_cases() {
        let tol = tols();
        let t = OperatorMatrix::zeros(2);
        let report = riemann_product_identity(&t, 0.5, 8, &tol).unwrap();
        assert!(report.residual <= 1e-12, "residual {}", report.residual);

        let t = OperatorMatrix::from_diag(&[C64::new(0.2, 0.0), C64::new(2.0, 0.0)]);
        let report = riemann_product_identity(&t, 0.5, 16, &tol).unwrap();
        assert!(report.residual <= 1e-10, "residual {}", report.residual);
    }
}
