//! Named property suites over randomized corpora: every module-level
//! invariant is bound to a named check with a pass/fail count, for the
//! command-line `verify` front end.

use serde::{Deserialize, Serialize};

use crate::assign::multiset_match_distance;
use crate::config::Tolerances;
use crate::ensemble::sample_ginibre;
use crate::error::{Error, Result};
use crate::hs::{
    hs_contour, hs_oracle, riemann_product_identity, ContourSpec, Region,
};
use crate::kernel::{eigenvalues, inverse, resolvent_apply, svd};
use crate::mat::{C64, OperatorMatrix};
use crate::stats::{
    brown_measure, dilate2, fk_determinant, log_norm, log_plus_moment, log_submajorizes,
    log_submajorizes_profiles, mu_profile, s_transform,
};
use crate::tri::{
    lidskii_check, phi_spectral_decomposition_consistency, pinch, quasinilpotent_profile, split,
    Flag, OrderingCurve,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyResult {
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    pub max_err: f64,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| !p.passed())
    }
}

/// Accumulates one named property over a case loop.
struct Check {
    property: String,
    cases: usize,
    failures: usize,
    max_err: f64,
    first_failure: Option<String>,
}

impl Check {
    fn new(property: &str) -> Self {
        Check {
            property: property.to_string(),
            cases: 0,
            failures: 0,
            max_err: 0.0,
            first_failure: None,
        }
    }

    fn case(&mut self, err: f64, bound: f64, context: impl Fn() -> String) {
        self.cases += 1;
        self.max_err = self.max_err.max(err);
        if !(err <= bound) {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{} (err {err:.3e} > {bound:.3e})", context()));
            }
        }
    }

    fn assert_true(&mut self, ok: bool, context: impl Fn() -> String) {
        self.case(if ok { 0.0 } else { 1.0 }, 0.5, context);
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            property: self.property,
            cases: self.cases,
            failures: self.failures,
            max_err: self.max_err,
            first_failure: self.first_failure,
        }
    }
}

fn derived_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(salt)
}

/// Random matrix with a few deterministic shape variations mixed in.
fn corpus_matrix(n: usize, seed: u64, index: u64) -> OperatorMatrix {
    let g = sample_ginibre(n, derived_seed(seed, index));
    match index % 4 {
        // Plain Ginibre.
        0 => g,
        // Strictly upper triangular (nilpotent).
        1 => OperatorMatrix::from_fn(n, |i, j| if j > i { g[(i, j)] } else { C64::new(0.0, 0.0) }),
        // Shifted to cluster the spectrum away from zero.
        2 => {
            let mut m = g;
            for i in 0..n {
                m[(i, i)] += C64::new(2.0, 0.0);
            }
            m
        }
        // Rank deficient: zero out the last row and column.
        _ => OperatorMatrix::from_fn(n, |i, j| {
            if i + 1 == n || j + 1 == n {
                C64::new(0.0, 0.0)
            } else {
                g[(i, j)]
            }
        }),
    }
}

pub fn determinant_suite(seed: u64, sizes: &[usize], tol: &Tolerances) -> Result<SuiteReport> {
    let mut multiplicativity = Check::new("determinant multiplicativity Delta(ST)=Delta(S)Delta(T)");
    let mut monotonicity = Check::new("determinant monotonicity 0<=S<=T");
    let mut fnorm_triangle = Check::new("F-norm triangle |S+T|_log <= |S|_log+|T|_log");
    let mut product_bound = Check::new("product bound |ST|_log <= |S|_log+|T|_log");
    let mut bounded_factor = Check::new("bounded factor |ST|_log <= max(|S|,1)|T|_log");
    let mut log_plus_triangle = Check::new("log+ triangle against doubled factors");
    let mut duality = Check::new("Brown/determinant duality at off-spectrum probes");
    let mut pushforwards = Check::new("adjoint and inverse push-forwards of the Brown measure");
    let mut quadrature = Check::new("|T|_log profile quadrature agreement");
    let mut s_submajorized = Check::new("S-transform submajorized by 4 sigma_2 mu");

    for (case, &n) in sizes.iter().enumerate() {
        let case = case as u64;
        let s = sample_ginibre(n, derived_seed(seed, 2 * case));
        let t = sample_ginibre(n, derived_seed(seed, 2 * case + 1));

        let ds = fk_determinant(&s, tol)?;
        let dt = fk_determinant(&t, tol)?;
        let dst = fk_determinant(&(&s * &t), tol)?;
        if ds > 0.0 && dt > 0.0 {
            multiplicativity.case(
                (dst - ds * dt).abs() / (ds * dt),
                1e-8,
                || format!("n={n} case={case}"),
            );
        }

        // 0 <= G*G <= G*G + R*R.
        let g = &s.adjoint() * &s;
        let r = &t.adjoint() * &t;
        let upper = &g + &r;
        let dg = fk_determinant(&g, tol)?;
        let du = fk_determinant(&upper, tol)?;
        monotonicity.assert_true(dg <= du * (1.0 + 1e-10), || format!("n={n} case={case}"));

        let ln_s = log_norm(&s)?;
        let ln_t = log_norm(&t)?;
        fnorm_triangle.case(
            (log_norm(&(&s + &t))? - ln_s - ln_t).max(0.0),
            1e-12,
            || format!("n={n} case={case}"),
        );
        product_bound.case(
            (log_norm(&(&s * &t))? - ln_s - ln_t).max(0.0),
            1e-12,
            || format!("n={n} case={case}"),
        );
        let s_op = svd(&s)?.values[0];
        bounded_factor.case(
            (log_norm(&(&s * &t))? - s_op.max(1.0) * ln_t).max(0.0),
            1e-12,
            || format!("n={n} case={case}"),
        );
        let lhs = log_plus_moment(&(&s + &t), 1.0)?;
        let rhs = log_plus_moment(&s, 0.5)? + log_plus_moment(&t, 0.5)?;
        log_plus_triangle.case((lhs - rhs).max(0.0), 1e-12, || format!("n={n} case={case}"));

        let nu = brown_measure(&t)?;
        let radius = nu.support().iter().map(|z| z.norm()).fold(1.0, f64::max);
        for probe_idx in 0..4u64 {
            let angle = probe_idx as f64 * 1.7 + 0.3;
            let lambda = C64::from_polar(2.0 * radius + 1.0, angle);
            let delta = fk_determinant(&t.shifted(lambda), tol)?;
            duality.case(
                (delta.ln() - nu.log_potential(lambda)).abs(),
                1e-9,
                || format!("n={n} case={case} probe={probe_idx}"),
            );
        }

        let adj_atoms: Vec<C64> = eigenvalues(&t.adjoint())?;
        let conj_atoms: Vec<C64> = nu.support().iter().map(|z| z.conj()).collect();
        pushforwards.case(
            multiset_match_distance(&adj_atoms, &conj_atoms),
            1e-8,
            || format!("adjoint n={n} case={case}"),
        );
        if fk_determinant(&t, tol)? > 0.0 {
            let inv_atoms = eigenvalues(&inverse(&t)?)?;
            let pushed: Vec<C64> = nu.support().iter().map(|z| z.inv()).collect();
            pushforwards.case(
                multiset_match_distance(&inv_atoms, &pushed),
                1e-8,
                || format!("inverse n={n} case={case}"),
            );
        }

        let direct = log_norm(&t)?;
        let via_profile = mu_profile(&t)?.log1p_integral();
        quadrature.case((direct - via_profile).abs(), 1e-12, || {
            format!("n={n} case={case}")
        });

        for variant in 0..2u64 {
            let m = corpus_matrix(n, derived_seed(seed, 100 + case), variant * 3 + 1);
            let s_profile = s_transform(&m)?;
            let bound = dilate2(&mu_profile(&m)?).scale(4.0);
            let report = log_submajorizes_profiles(&bound, &s_profile, tol.submajorization_slack);
            s_submajorized.assert_true(report.holds, || {
                format!("n={n} case={case} variant={variant}")
            });
        }
    }

    Ok(SuiteReport {
        suite: "determinant".into(),
        properties: vec![
            multiplicativity.finish(),
            monotonicity.finish(),
            fnorm_triangle.finish(),
            product_bound.finish(),
            bounded_factor.finish(),
            log_plus_triangle.finish(),
            duality.finish(),
            pushforwards.finish(),
            quadrature.finish(),
            s_submajorized.finish(),
        ],
    })
}

pub fn projections_suite(seed: u64, sizes: &[usize], tol: &Tolerances) -> Result<SuiteReport> {
    let mut defining = Check::new("projection is Hermitian idempotent and T-invariant");
    let mut splitting = Check::new("determinant and Brown measure split at invariant projections");
    let mut nesting = Check::new("lattice monotonicity for nested regions");
    let mut convergence = Check::new("contour projections converge to the oracle");
    let mut riemann = Check::new("Riemann product identity of the two-circle sums");
    let mut resolvent = Check::new("resolvent identity at paired probes");

    for (case, &n) in sizes.iter().enumerate() {
        let case = case as u64;
        let t = sample_ginibre(n, derived_seed(seed, 7 + case));
        let spectrum = eigenvalues(&t)?;
        let centroid = spectrum.iter().sum::<C64>() / n as f64;
        let radii: Vec<f64> = spectrum.iter().map(|&z| (z - centroid).norm()).collect();
        let max_r = radii.iter().fold(0.0f64, |a, &b| a.max(b));
        // Place the circle in the widest radial gap so it clears the spectrum.
        let (radius, half_gap) = {
            let mut sorted = radii.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut best = (0.5 * sorted[0].max(1e-3), 0.5 * sorted[0]);
            for w in sorted.windows(2) {
                let gap = w[1] - w[0];
                if gap > 2.0 * best.1 {
                    best = (0.5 * (w[0] + w[1]), 0.5 * gap);
                }
            }
            best
        };
        let disk = Region::disk(centroid, radius);
        let p = match hs_oracle(&t, &disk, tol) {
            Ok(p) => p,
            Err(Error::BoundaryAmbiguous { .. }) => continue,
            Err(e) => return Err(e),
        };
        let d = p.diagnostics(&t);
        defining.case(
            d.hermiticity.max(d.idempotency).max(d.invariance),
            1e-9 * n as f64,
            || format!("n={n} case={case}"),
        );

        let k = p.rank(n);
        if k > 0 && k < n {
            let form = crate::kernel::schur_ordered(&t, |a, b| {
                disk.contains(*b).cmp(&disk.contains(*a))
            })?;
            let u = &form.unitary;
            let top = crate::tri::bounds::compression_spectrum(&t, u, 0, k)?;
            let bottom = crate::tri::bounds::compression_spectrum(&t, u, k, n)?;
            let mut combined = top.clone();
            combined.extend(bottom.iter().copied());
            splitting.case(
                multiset_match_distance(&spectrum, &combined),
                1e-8 * max_r.max(1.0),
                || format!("multiset split n={n} case={case}"),
            );
            let delta_t = fk_determinant(&t, tol)?;
            let da = block_determinant(&top);
            let dc = block_determinant(&bottom);
            if delta_t > 0.0 && da > 0.0 && dc > 0.0 {
                let weighted = da.powf(k as f64 / n as f64)
                    * dc.powf((n - k) as f64 / n as f64);
                splitting.case(
                    (weighted - delta_t).abs() / delta_t,
                    1e-8,
                    || format!("determinant split n={n} case={case}"),
                );
            }
        }

        // Nested disks give nested projections: |(1-P2) P1| small.
        let inner_disk = Region::disk(centroid, radius * 0.999);
        if let Ok(p_inner) = hs_oracle(&t, &inner_disk, tol) {
            let outer_disk = Region::disk(centroid, radius * 1.25);
            if let Ok(p_outer) = hs_oracle(&t, &outer_disk, tol) {
                let identity = OperatorMatrix::identity(n);
                let residual =
                    (&(&identity - &p_outer.matrix) * &p_inner.matrix).fro_norm();
                nesting.case(residual, 1e-8, || format!("n={n} case={case}"));
            }
        }

        // Contour route against the oracle at growing node counts.
        if n <= 16 && half_gap > 0.02 * max_r.max(1e-3) {
            let mut last = f64::INFINITY;
            for nodes in [64usize, 256, 1024] {
                let spec = ContourSpec::new(centroid, radius, nodes, 0.5 * half_gap);
                let pc = hs_contour(&t, &spec, tol)?;
                let dev = (&pc.matrix - &p.matrix).fro_norm();
                convergence.assert_true(dev <= last.max(1e-10), || {
                    format!("n={n} nodes={nodes} dev={dev:.3e}")
                });
                last = dev;
            }
            convergence.case(last, 1e-6, || format!("final deviation n={n}"));
        }

        if n <= 16 {
            // Rescale the spectrum into a band avoiding both unit circles.
            let scale = 0.45 / max_r.max(1e-3);
            let rescaled = t.shifted(centroid).scale(C64::new(scale, 0.0));
            let report = riemann_product_identity(&rescaled, 0.7, 16, tol)?;
            riemann.case(
                report.residual,
                1e-8 * report.cond.max(1.0),
                || format!("n={n} case={case}"),
            );
        }

        let z1 = centroid + C64::new(2.5 * max_r.max(1.0), 0.7);
        let z2 = centroid - C64::new(0.0, 2.5 * max_r.max(1.0));
        let r1 = resolvent_apply(&t, z1, tol)?;
        let r2 = resolvent_apply(&t, z2, tol)?;
        let lhs = &r1 - &r2;
        let rhs = (&r1 * &r2).scale(z2 - z1);
        resolvent.case(
            (&lhs - &rhs).fro_norm(),
            tol.eps_solve(n) * 1e3,
            || format!("n={n} case={case}"),
        );
    }

    Ok(SuiteReport {
        suite: "projections".into(),
        properties: vec![
            defining.finish(),
            splitting.finish(),
            nesting.finish(),
            convergence.finish(),
            riemann.finish(),
            resolvent.finish(),
        ],
    })
}

fn block_determinant(eigs: &[C64]) -> f64 {
    let k = eigs.len() as f64;
    let mut acc = 0.0;
    for z in eigs {
        let m = z.norm();
        if m == 0.0 {
            return 0.0;
        }
        acc += m.ln();
    }
    (acc / k).exp()
}

pub fn split_suite(seed: u64, sizes: &[usize], tol: &Tolerances) -> Result<SuiteReport> {
    let mut normal_inputs = Check::new("normal inputs split with Q = 0 under every curve");
    let mut invariants = Check::new("split invariants: reconstruction, normality, nilpotence");
    let mut spectra = Check::new("curve-independent spectra and Schur Frobenius identity");
    let mut pinch_flags = Check::new("invariant-flag pinching preserves determinant and spectrum");
    let mut lidskii = Check::new("trace equals eigenvalue sum through the split");
    let mut partition = Check::new("flag cuts partition the spectrum exactly");

    let curves = [
        OrderingCurve::Lexicographic,
        OrderingCurve::Spiral,
        OrderingCurve::hilbert_default(),
    ];
    for (case, &n) in sizes.iter().enumerate() {
        let case = case as u64;
        let t = corpus_matrix(n, derived_seed(seed, 31 + case), case);
        let spectrum = eigenvalues(&t)?;
        let scale = t.fro_norm().max(1.0);

        // Normal input: unitary diagonalizable by construction.
        let d = OperatorMatrix::from_diag(&spectrum);
        for curve in &curves {
            let s = split(&d, curve, tol)?;
            normal_inputs.case(s.nilpotent.fro_norm(), 1e-10 * scale, || {
                format!("n={n} curve={curve:?}")
            });
        }

        let eig_sq: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
        for curve in &curves {
            let s = split(&t, curve, tol)?;
            let defect = s
                .reconstruction_defect(&t)
                .max(s.normality_defect() / s.normal.fro_norm().max(1.0).powi(2));
            invariants.case(defect, 1e-9 * n as f64 * scale, || {
                format!("n={n} curve={curve:?}")
            });
            let profile = quasinilpotent_profile(&s.nilpotent, n);
            let q_scale = s.nilpotent.op_norm_est();
            invariants.assert_true(
                q_scale == 0.0 || profile[n - 1] <= 1e-6f64.powf(1.0 / n as f64) * q_scale,
                || format!("nilpotence n={n} curve={curve:?}"),
            );
            spectra.case(
                multiset_match_distance(&s.eigenvalues(), &spectrum),
                1e-8 * scale,
                || format!("n={n} curve={curve:?}"),
            );
            let fro_identity =
                (s.nilpotent.fro_norm().powi(2) - (t.fro_norm().powi(2) - eig_sq)).abs();
            spectra.case(fro_identity, 1e-8 * scale * scale, || {
                format!("Frobenius identity n={n} curve={curve:?}")
            });
        }

        let s = split(&t, &OrderingCurve::Lexicographic, tol)?;
        let flag = s.full_flag();
        let report = crate::tri::pinch_preserves(&t, &flag, tol)?;
        pinch_flags.assert_true(
            report.delta_consistent && report.brown_match && report.submajorization.holds,
            || format!("n={n} case={case}"),
        );
        // Coarser cuts of the same invariant flag.
        let coarse = s.flag_with_cuts(vec![n / 2])?;
        let report = crate::tri::pinch_preserves(&t, &coarse, tol)?;
        pinch_flags.assert_true(
            report.delta_consistent && report.submajorization.holds,
            || format!("coarse flag n={n}"),
        );

        let l = lidskii_check(&t, tol)?;
        lidskii.case(l.max_abs_gap, 1e-10 * scale, || format!("n={n} case={case}"));

        let c = phi_spectral_decomposition_consistency(&t, tol)?;
        partition.case(c.max_gap, 1e-8 * scale, || format!("n={n} case={case}"));
    }

    Ok(SuiteReport {
        suite: "split".into(),
        properties: vec![
            normal_inputs.finish(),
            invariants.finish(),
            spectra.finish(),
            pinch_flags.finish(),
            lidskii.finish(),
            partition.finish(),
        ],
    })
}

pub fn submajorization_suite(seed: u64, sizes: &[usize], tol: &Tolerances) -> Result<SuiteReport> {
    let mut reflexive = Check::new("submajorization is reflexive with zero margins");
    let mut s_bound = Check::new("S(T) <<_log 4 sigma_2 mu(T) including singular inputs");
    let mut pinch_bound = Check::new("pinch(T) <<_log T along invariant flags at every cut");
    let mut dilation = Check::new("dilation evaluates as p(t/2)");
    let mut bounds_hold = Check::new("commutator bounds with constants 300 and 400 pi");

    for (case, &n) in sizes.iter().enumerate() {
        let case = case as u64;
        for variant in 0..4u64 {
            let t = corpus_matrix(n, derived_seed(seed, 57 + case), variant);
            let refl = log_submajorizes(&t, &t, tol)?;
            reflexive.assert_true(
                refl.holds && refl.margins.iter().all(|&m| m.abs() < 1e-12 || m == 0.0),
                || format!("n={n} variant={variant}"),
            );
            let bound = dilate2(&mu_profile(&t)?).scale(4.0);
            let report =
                log_submajorizes_profiles(&bound, &s_transform(&t)?, tol.submajorization_slack);
            s_bound.assert_true(report.holds, || format!("n={n} variant={variant}"));

            let flag = if variant == 1 {
                // Strictly upper triangular: coordinate flags are invariant.
                Flag::coordinate(n, vec![n.div_ceil(3), 2 * n / 3 + 1, n])?
            } else {
                let s = split(&t, &OrderingCurve::Spiral, tol)?;
                s.flag_with_cuts(vec![n.div_ceil(3), 2 * n / 3 + 1])?
            };
            let pinched = pinch(&t, &flag);
            pinch_bound.assert_true(log_submajorizes(&t, &pinched, tol)?.holds, || {
                format!("n={n} variant={variant}")
            });

            let p = mu_profile(&t)?;
            let d = dilate2(&p);
            let mut worst = 0.0f64;
            for k in 1..=n {
                let tk = k as f64 / n as f64;
                worst = worst.max((d.value_at(tk) - p.value_at(tk / 2.0)).abs());
            }
            dilation.case(worst, 0.0, || format!("n={n} variant={variant}"));
        }

        // Strictly triangular Q over dyadic scales.
        let q = corpus_matrix(n, derived_seed(seed, 91 + case), 1);
        let q_norm = q.op_norm_est().max(1e-9);
        let s_grid: Vec<f64> = (-4..=2).map(|k| 2f64.powi(k) * q_norm).collect();
        let reports = crate::tri::commutator_bound_suite(&q, &s_grid, tol)?;
        for r in reports {
            bounds_hold.assert_true(r.holds, || format!("n={n} s={}", r.s));
        }
    }

    Ok(SuiteReport {
        suite: "submajorization".into(),
        properties: vec![
            reflexive.finish(),
            s_bound.finish(),
            pinch_bound.finish(),
            dilation.finish(),
            bounds_hold.finish(),
        ],
    })
}

pub const SUITE_NAMES: &[&str] = &["determinant", "projections", "split", "submajorization"];

pub fn run_suites(
    which: &str,
    seed: u64,
    sizes: &[usize],
    tol: &Tolerances,
) -> Result<Vec<SuiteReport>> {
    let run_one = |name: &str| -> Result<SuiteReport> {
        match name {
            "determinant" => determinant_suite(seed, sizes, tol),
            "projections" => projections_suite(seed, sizes, tol),
            "split" => split_suite(seed, sizes, tol),
            "submajorization" => submajorization_suite(seed, sizes, tol),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    };
    if which == "all" {
        SUITE_NAMES.iter().map(|name| run_one(name)).collect()
    } else {
        Ok(vec![run_one(which)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_a_small_corpus() {
        let tol = Tolerances::default();
        let reports = run_suites("all", 20240, &[4, 9], &tol).unwrap();
        assert_eq!(reports.len(), 4);
        for report in &reports {
            for p in &report.properties {
                assert!(
                    p.passed(),
                    "suite {} property '{}' failed: {:?} (max_err {:.3e})",
                    report.suite,
                    p.property,
                    p.first_failure,
                    p.max_err
                );
                assert!(p.cases > 0, "property '{}' ran no cases", p.property);
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let tol = Tolerances::default();
        let a = run_suites("determinant", 5, &[4], &tol).unwrap();
        let b = run_suites("determinant", 5, &[4], &tol).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn unknown_suite_rejected() {
        let tol = Tolerances::default();
        assert!(run_suites("nope", 1, &[4], &tol).is_err());
    }
}
