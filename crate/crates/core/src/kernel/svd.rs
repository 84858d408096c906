//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Jacobi delivers high relative accuracy on the small singular values, which
//! the determinant and submajorization calculus depend on.

use crate::error::{Error, Result};
use crate::mat::{dot, norm, C64, OperatorMatrix, ZERO};

#[derive(Clone, Debug)]
pub struct Svd {
    pub u: OperatorMatrix,
    /// Descending, nonnegative.
    pub values: Vec<f64>,
    pub v: OperatorMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> OperatorMatrix {
        let n = self.values.len();
        let mut us = self.u.clone();
        for j in 0..n {
            for i in 0..n {
                us[(i, j)] = us[(i, j)] * self.values[j];
            }
        }
        &us * &self.v.adjoint()
    }

    /// Count of singular values above `rel_tol * largest`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

pub fn svd(t: &OperatorMatrix) -> Result<Svd> {
    t.check_finite()?;
    let n = t.dim();
    // Work columns w_j; A = W V* throughout, with V accumulated.
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| t[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO })
                .collect()
        })
        .collect();

    let max_sweeps = 60;
    let tol = 1e-14;
    let mut converged = false;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let app: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                let apq = dot(&w[p], &w[q]);
                let mag = apq.norm();
                let rel = mag / (app * aqq).sqrt();
                off = off.max(rel);
                if rel <= tol {
                    continue;
                }
                let phase = apq / mag;
                let zeta = (aqq - app) / (2.0 * mag);
                let t_rot = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t_rot * t_rot).sqrt();
                let s = c * t_rot;
                // Columns (p, q) <- (c*p - s*conj(phase)*q, s*phase*p + c*q)
                for i in 0..n {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    w[p][i] = wp * c - wq * phase.conj() * s;
                    w[q][i] = wp * phase * s + wq * c;
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = vp * c - vq * phase.conj() * s;
                    v[q][i] = vp * phase * s + vq * c;
                }
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        // One last measurement: accept if the residual orthogonality is tiny
        // relative to machine precision expectations.
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let app: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                worst = worst.max(dot(&w[p], &w[q]).norm() / (app * aqq).sqrt());
            }
        }
        if worst > 1e-10 {
            return Err(Error::SvdNonConvergence {
                n,
                sweeps: max_sweeps,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|col| norm(col)).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &j in &order {
        values.push(norms[j]);
        v_cols.push(v[j].clone());
        if norms[j] > 0.0 {
            u_cols.push(w[j].iter().map(|z| z / norms[j]).collect());
        } else {
            u_cols.push(vec![ZERO; n]);
        }
    }
    complete_orthonormal(&mut u_cols, &values);

    let u = OperatorMatrix::from_fn(n, |i, j| u_cols[j][i]);
    let v = OperatorMatrix::from_fn(n, |i, j| v_cols[j][i]);
    Ok(Svd { u, values, v })
}

/// Replaces the columns belonging to (numerically) zero singular values with
/// an orthonormal completion of the leading columns.
fn complete_orthonormal(cols: &mut [Vec<C64>], values: &[f64]) {
    let n = cols.len();
    let top = values.first().copied().unwrap_or(0.0);
    let cutoff = top * 1e-14;
    // Values are sorted descending, so the kept prefix is contiguous.
    let kept = values.iter().take_while(|&&s| s > cutoff).count();
    if kept == n {
        return;
    }
    let mut basis: Vec<Vec<C64>> = cols[..kept].to_vec();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut cand: Vec<C64> = vec![ZERO; n];
        cand[e] = C64::new(1.0, 0.0);
        for b in &basis {
            let overlap = dot(b, &cand);
            for i in 0..n {
                let d = b[i] * overlap;
                cand[i] -= d;
            }
        }
        let r = norm(&cand);
        if r > 0.5 {
            for z in cand.iter_mut() {
                *z /= r;
            }
            basis.push(cand);
        }
    }
    // Greedy completion can fall short only through numerical degeneracy;
    // fill deterministically from remaining coordinates if so.
    let mut e = 0usize;
    while basis.len() < n && e < n {
        let mut cand: Vec<C64> = vec![ZERO; n];
        cand[e] = C64::new(1.0, 0.0);
        for b in &basis {
            let overlap = dot(b, &cand);
            for i in 0..n {
                let d = b[i] * overlap;
                cand[i] -= d;
            }
        }
        let r = norm(&cand);
        if r > 1e-6 {
            for z in cand.iter_mut() {
                *z /= r;
            }
            basis.push(cand);
        }
        e += 1;
    }
    let mut replacement = basis.into_iter();
    for col in cols.iter_mut() {
        *col = replacement.next().expect("orthonormal completion exists");
    }
}
