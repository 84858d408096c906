//! Quasinilpotence profiles, the Lidskii trace consistency check, and the
//! spectral commutator estimates with their explicit constants.

use serde::{Deserialize, Serialize};

use crate::assign::multiset_match_distance;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernel::eigenvalues;
use crate::mat::{C64, OperatorMatrix};
use crate::stats::{log_plus_moment, phi, AtomicMeasure};
use crate::tri::{split, OrderingCurve};

/// Growth-normalized nilpotence threshold for |Q^n| against |Q|^n.
pub const NILPOTENCE_KAPPA: f64 = 1e-8;

/// |Q^k|^(1/k) for k = 1..=max_power, computed on Q/|Q| so intermediate
/// powers neither overflow nor underflow.
pub fn quasinilpotent_profile(q: &OperatorMatrix, max_power: usize) -> Vec<f64> {
    assert!(max_power >= 1);
    let scale = q.op_norm_est();
    if scale == 0.0 {
        return vec![0.0; max_power];
    }
    let unit = q.scale(C64::new(1.0 / scale, 0.0));
    let mut power = unit.clone();
    let mut out = Vec::with_capacity(max_power);
    for k in 1..=max_power {
        let norm_k = power.op_norm_est();
        out.push(scale * norm_k.powf(1.0 / k as f64));
        if k < max_power {
            power = &power * &unit;
        }
    }
    out
}

/// True when |Q^n| <= kappa |Q|^n, the growth-normalized matrix reading of
/// a Brown measure concentrated at 0.
pub fn is_nilpotent(q: &OperatorMatrix) -> bool {
    let n = q.dim();
    let profile = quasinilpotent_profile(q, n);
    let scale = q.op_norm_est();
    if scale == 0.0 {
        return true;
    }
    // profile[n-1] = |Q^n|^(1/n); compare in root scale.
    profile[n - 1] <= NILPOTENCE_KAPPA.powf(1.0 / n as f64) * scale
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LidskiiReport {
    pub trace: C64,
    pub normal_trace: C64,
    pub eigenvalue_sum: C64,
    pub max_abs_gap: f64,
}

/// tau(T) = tau(N) = integral of z over the Brown measure, and tau(Q) = 0.
pub fn lidskii_check(t: &OperatorMatrix, tol: &Tolerances) -> Result<LidskiiReport> {
    let s = split(t, &OrderingCurve::Lexicographic, tol)?;
    let trace = t.tau();
    let normal_trace = s.normal.tau();
    let eigenvalue_sum = AtomicMeasure::from_points(&s.eigenvalues()).mean();
    let gaps = [
        (trace - normal_trace).norm(),
        (trace - eigenvalue_sum).norm(),
        (normal_trace - eigenvalue_sum).norm(),
    ];
    Ok(LidskiiReport {
        trace,
        normal_trace,
        eigenvalue_sum,
        max_abs_gap: gaps.into_iter().fold(0.0, f64::max),
    })
}

/// One scale of the commutator bound suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SBoundReport {
    pub s: f64,
    /// |tau(A E_|A|[0, s])| for A = Re(Q).
    pub re_lhs: f64,
    /// |tau(B E_|B|[0, s])| for B = Im(Q).
    pub im_lhs: f64,
    /// 300 s tau(log^+(2e|Q|/s)).
    pub pointwise_rhs: f64,
    /// |integral over theta of Re Phi(s, Q + e^(i theta) Q*)|.
    pub theta_lhs: f64,
    /// 400 pi s tau(log^+(2e|Q|/s)).
    pub theta_rhs: f64,
    /// Trapezoid error estimate from the last node doubling.
    pub quadrature_error: f64,
    pub holds: bool,
}

/// tau(A E_|A|[0, s]) for Hermitian A: the mean of the eigenvalues of
/// modulus at most s.
fn truncated_trace(eigs_re: &[f64], s: f64) -> f64 {
    let n = eigs_re.len() as f64;
    eigs_re
        .iter()
        .filter(|&&a| a.abs() <= s)
        .sum::<f64>()
        / n
}

/// Checks, for each s in the grid, the spectral bounds with constants 300 and
/// 400 pi. The theta integral is a periodic trapezoid rule with node doubling
/// until the change falls below 1% of the right-hand side (the matrices
/// Q + e^(i theta) Q* are normal, so their Brown measures are spectral).
pub fn commutator_bound_suite(
    q: &OperatorMatrix,
    s_grid: &[f64],
    _tol: &Tolerances,
) -> Result<Vec<SBoundReport>> {
    let n = q.dim();
    if !is_nilpotent(q) {
        let profile = quasinilpotent_profile(q, n);
        return Err(Error::NotNilpotent {
            power: n,
            value: profile[n - 1],
            scale: q.op_norm_est(),
        });
    }
    if s_grid.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidArgument("s grid must be positive".into()));
    }

    let a_eigs: Vec<f64> = real_spectrum(&q.hermitian_part())?;
    let b_eigs: Vec<f64> = real_spectrum(&q.skew_part())?;
    let two_e = 2.0 * std::f64::consts::E;

    // theta-eigenvalue cache, refined by doubling with node reuse.
    let mut node_eigs: Vec<Vec<C64>> = Vec::new();
    let refine_to = |target: usize, cache: &mut Vec<Vec<C64>>| -> Result<()> {
        if target <= cache.len() {
            return Ok(());
        }
        if cache.is_empty() {
            for j in 0..target {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / target as f64;
                cache.push(theta_spectrum(q, theta)?);
            }
            return Ok(());
        }
        assert_eq!(target, cache.len() * 2);
        let mut merged = Vec::with_capacity(target);
        for (j, old) in cache.iter().enumerate() {
            merged.push(old.clone());
            let theta = 2.0 * std::f64::consts::PI * (2 * j + 1) as f64 / target as f64;
            merged.push(theta_spectrum(q, theta)?);
        }
        *cache = merged;
        Ok(())
    };

    let rhs_for = |s: f64| -> Result<(f64, f64)> {
        let moment = log_plus_moment(q, s / two_e)?;
        Ok((
            300.0 * s * moment,
            400.0 * std::f64::consts::PI * s * moment,
        ))
    };

    // Integral estimates per s at the current node count.
    let integral = |cache: &[Vec<C64>], s: f64| -> f64 {
        let m = cache.len() as f64;
        let h = 2.0 * std::f64::consts::PI / m;
        cache
            .iter()
            .map(|eigs| {
                let nu = AtomicMeasure::from_points(eigs);
                phi(s, &nu).re
            })
            .sum::<f64>()
            * h
    };

    let mut nodes = 64;
    refine_to(nodes, &mut node_eigs)?;
    let mut current: Vec<f64> = s_grid.iter().map(|&s| integral(&node_eigs, s)).collect();
    let mut quad_errors: Vec<f64> = vec![f64::INFINITY; s_grid.len()];
    let floor = 1e-10 * q.fro_norm().max(1.0);
    loop {
        refine_to(nodes * 2, &mut node_eigs)?;
        nodes *= 2;
        let refined: Vec<f64> = s_grid.iter().map(|&s| integral(&node_eigs, s)).collect();
        let mut all_ok = true;
        for (idx, &s) in s_grid.iter().enumerate() {
            let (_, theta_rhs) = rhs_for(s)?;
            quad_errors[idx] = (refined[idx] - current[idx]).abs();
            if quad_errors[idx] > 0.005 * theta_rhs + floor {
                all_ok = false;
            }
        }
        current = refined;
        if all_ok || nodes >= 8192 {
            break;
        }
    }

    let slack = 1e-10 * q.fro_norm().max(1.0);
    let mut out = Vec::with_capacity(s_grid.len());
    for (idx, &s) in s_grid.iter().enumerate() {
        let (pointwise_rhs, theta_rhs) = rhs_for(s)?;
        let re_lhs = truncated_trace(&a_eigs, s).abs();
        let im_lhs = truncated_trace(&b_eigs, s).abs();
        let theta_lhs = current[idx].abs();
        let quadrature_error = quad_errors[idx];
        let holds = re_lhs <= pointwise_rhs + slack
            && im_lhs <= pointwise_rhs + slack
            && theta_lhs <= theta_rhs + quadrature_error + slack;
        out.push(SBoundReport {
            s,
            re_lhs,
            im_lhs,
            pointwise_rhs,
            theta_lhs,
            theta_rhs,
            quadrature_error,
            holds,
        });
    }
    Ok(out)
}

/// Real eigenvalues of a Hermitian matrix through the Schur path.
fn real_spectrum(a: &OperatorMatrix) -> Result<Vec<f64>> {
    Ok(eigenvalues(a)?.into_iter().map(|z| z.re).collect())
}

/// Spectrum of the normal matrix Q + e^(i theta) Q*.
fn theta_spectrum(q: &OperatorMatrix, theta: f64) -> Result<Vec<C64>> {
    let m = &q.clone() + &q.adjoint().scale(C64::from_polar(1.0, theta));
    eigenvalues(&m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub cuts: usize,
    /// Largest multiset mismatch between the flag partition of the spectrum
    /// and independently computed compression spectra.
    pub max_gap: f64,
}

/// At every flag cut, the eigenvalues of the two diagonal compressions
/// partition the spectrum of T exactly. The compressions are re-decomposed
/// independently so the check is not circular.
pub fn phi_spectral_decomposition_consistency(
    t: &OperatorMatrix,
    tol: &Tolerances,
) -> Result<ConsistencyReport> {
    let s = split(t, &OrderingCurve::Lexicographic, tol)?;
    let n = t.dim();
    let full: Vec<C64> = s.eigenvalues();
    let u = &s.schur.unitary;
    let mut max_gap = 0.0f64;
    for k in 1..n {
        let top = compression_spectrum(t, u, 0, k)?;
        let bottom = compression_spectrum(t, u, k, n)?;
        let mut combined = top;
        combined.extend(bottom);
        max_gap = max_gap.max(multiset_match_distance(&full, &combined));
    }
    Ok(ConsistencyReport {
        cuts: n - 1,
        max_gap,
    })
}

/// Spectrum of the compression of T to columns lo..hi of the unitary U,
/// via a fresh Schur decomposition of the block.
pub fn compression_spectrum(
    t: &OperatorMatrix,
    u: &OperatorMatrix,
    lo: usize,
    hi: usize,
) -> Result<Vec<C64>> {
    let cols = u.columns(lo, hi);
    let k = hi - lo;
    let n = t.dim();
    let mut block = OperatorMatrix::zeros(k);
    // B = V* T V for the n x k column block V.
    let mut tv: Vec<Vec<C64>> = Vec::with_capacity(k);
    for col in &cols {
        tv.push(t.mul_vec(col));
    }
    for i in 0..k {
        for j in 0..k {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..n {
                acc += cols[i][r].conj() * tv[j][r];
            }
            block[(i, j)] = acc;
        }
    }
    eigenvalues(&block)
}
