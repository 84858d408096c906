//! LU factorization with partial pivoting and the solves built on it.

use crate::error::{Error, Result};
use crate::mat::{norm, C64, OperatorMatrix, ZERO};

/// Compact LU factors of a square complex matrix, P A = L U.
pub struct LuFactors {
    n: usize,
    /// Combined storage: unit-lower multipliers below the diagonal, U on and above.
    lu: Vec<C64>,
    /// Row permutation: `perm[i]` is the source row of factored row i.
    perm: Vec<usize>,
}

pub fn lu(a: &OperatorMatrix) -> LuFactors {
    let n = a.dim();
    let mut m: Vec<C64> = a.data().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m[k * n + k].norm();
        for i in k + 1..n {
            let mag = m[i * n + k].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_row != k {
            for j in 0..n {
                m.swap(k * n + j, pivot_row * n + j);
            }
            perm.swap(k, pivot_row);
        }
        let pivot = m[k * n + k];
        if pivot == ZERO {
            continue;
        }
        for i in k + 1..n {
            let factor = m[i * n + k] / pivot;
            m[i * n + k] = factor;
            if factor == ZERO {
                continue;
            }
            for j in k + 1..n {
                let ukj = m[k * n + j];
                m[i * n + j] -= factor * ukj;
            }
        }
    }
    LuFactors { n, lu: m, perm }
}

impl LuFactors {
    pub fn min_abs_pivot(&self) -> f64 {
        (0..self.n)
            .map(|k| self.lu[k * self.n + k].norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_pivot(&self) -> f64 {
        (0..self.n)
            .map(|k| self.lu[k * self.n + k].norm())
            .fold(0.0, f64::max)
    }

    /// |det A| as the product of pivot magnitudes.
    pub fn abs_det(&self) -> f64 {
        (0..self.n)
            .map(|k| self.lu[k * self.n + k].norm())
            .product()
    }

    pub fn is_singular(&self) -> bool {
        self.min_abs_pivot() == 0.0
    }

    /// Solves A x = b in place conventions: returns x.
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            let d = self.lu[i * n + i];
            x[i] = if d == ZERO { ZERO } else { acc / d };
        }
        x
    }

    /// Solves A* x = b using the same factors (U* L* P x = b).
    pub fn solve_adjoint_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = b.to_vec();
        // Forward substitution with U*.
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            let d = self.lu[i * n + i].conj();
            y[i] = if d == ZERO { ZERO } else { acc / d };
        }
        // Back substitution with L* (unit diagonal).
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = acc;
        }
        // Undo the row permutation: x = P^T y.
        let mut x = vec![ZERO; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    /// Solves A X = B columnwise.
    pub fn solve_mat(&self, b: &OperatorMatrix) -> OperatorMatrix {
        let n = self.n;
        let mut out = OperatorMatrix::zeros(n);
        let mut col = vec![ZERO; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    /// Smallest-singular-value estimate by inverse iteration on (A*A)^-1.
    ///
    /// Overestimates sigma_min by at most a modest factor after a few
    /// iterations; intended as a guard, not as an exact value.
    pub fn smallest_singular_value_est(&self) -> f64 {
        let n = self.n;
        if self.is_singular() {
            return 0.0;
        }
        let mut v: Vec<C64> = (0..n)
            .map(|i| {
                C64::new(
                    1.0 + 0.17 * (i as f64 + 1.0).sin(),
                    0.23 * (i as f64 + 2.0).cos(),
                )
            })
            .collect();
        let nv = norm(&v);
        for z in v.iter_mut() {
            *z /= nv;
        }
        let mut estimate = f64::INFINITY;
        for _ in 0..6 {
            // w = A^-* A^-1 ... applied as (A* (A v-step)): inverse iteration
            // for the smallest singular pair uses solves with A and A*.
            let y = self.solve_vec(&v);
            let w = self.solve_adjoint_vec(&y);
            let nw = norm(&w);
            if !nw.is_finite() || nw == 0.0 {
                return 0.0;
            }
            estimate = (norm(&y) / nw).min(estimate);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / nw;
            }
        }
        // After convergence |y| / |w| -> sigma_min; fall back to a Rayleigh
        // style bound from the last iterate.
        let y = self.solve_vec(&v);
        let ny = norm(&y);
        if ny == 0.0 {
            0.0
        } else {
            estimate.min(1.0 / ny)
        }
    }
}

pub fn solve(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let f = lu(a);
    if f.is_singular() {
        return Err(Error::InvalidArgument(
            "linear system is exactly singular".into(),
        ));
    }
    Ok(f.solve_mat(b))
}

pub fn inverse(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    solve(a, &OperatorMatrix::identity(a.dim()))
}

/// X = B A^-1, via the adjoint system A* X* = B*.
pub fn solve_right(b: &OperatorMatrix, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = a.dim();
    let f = lu(a);
    if f.is_singular() {
        return Err(Error::InvalidArgument(
            "linear system is exactly singular".into(),
        ));
    }
    let b_adj = b.adjoint();
    let mut out = OperatorMatrix::zeros(n);
    let mut col = vec![ZERO; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = b_adj[(i, j)];
        }
        let x = f.solve_adjoint_vec(&col);
        for i in 0..n {
            // out = (A^-* B*)* = B A^-1
            out[(j, i)] = x[i].conj();
        }
    }
    Ok(out)
}

/// log det of a Hermitian positive definite matrix via Cholesky.
///
/// Returns sum of log of the Cholesky diagonal (i.e. (1/2) log det).
pub fn hpd_half_log_det(a: &OperatorMatrix) -> Result<f64> {
    let n = a.dim();
    let mut l = vec![ZERO; n * n];
    let mut half_log_det = 0.0f64;
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not positive definite at pivot {j} ({d:.3e})"
            )));
        }
        let dj = d.sqrt();
        l[j * n + j] = C64::new(dj, 0.0);
        half_log_det += dj.ln();
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = acc / dj;
        }
    }
    Ok(half_log_det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ONE as M1;

    fn example() -> OperatorMatrix {
        OperatorMatrix::from_rows(vec![
            vec![C64::new(2.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.5, -0.5)],
            vec![C64::new(0.0, 3.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(4.0, -1.0), C64::new(-2.0, 2.0)],
        ])
        .unwrap()
    }

    #[test]
    fn solve_recovers_identity() {
        let a = example();
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).dist_to_identity() < 1e-12);
        assert!((&inv * &a).dist_to_identity() < 1e-12);
    }

    #[test]
    fn adjoint_solve_matches_direct() {
        let a = example();
        let f = lu(&a);
        let b = vec![M1, C64::new(0.0, 1.0), C64::new(2.0, -1.0)];
        let x = f.solve_adjoint_vec(&b);
        let residual: Vec<C64> = a
            .adjoint()
            .mul_vec(&x)
            .iter()
            .zip(&b)
            .map(|(l, r)| l - r)
            .collect();
        assert!(norm(&residual) < 1e-12);
    }

    #[test]
    fn solve_right_gives_b_times_inverse() {
        let a = example();
        let b = OperatorMatrix::from_real_rows(&[
            &[1.0, 0.0, 2.0],
            &[0.0, 1.0, 0.0],
            &[3.0, 0.0, 1.0],
        ])
        .unwrap();
        let x = solve_right(&b, &a).unwrap();
        assert!((&(&x * &a) - &b).fro_norm() < 1e-11);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = OperatorMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        let f = lu(&a);
        assert!(f.is_singular());
        assert_eq!(f.abs_det(), 0.0);
    }

    #[test]
    fn sigma_min_estimate_close_on_diagonal() {
        let a = OperatorMatrix::from_diag(&[
            C64::new(5.0, 0.0),
            C64::new(0.001, 0.0),
            C64::new(1.0, 0.0),
        ]);
        let est = lu(&a).smallest_singular_value_est();
        assert!(est >= 0.00099 && est <= 0.0011, "est = {est}");
    }

    #[test]
    fn hpd_half_log_det_matches_diagonal() {
        let a = OperatorMatrix::from_diag(&[C64::new(4.0, 0.0), C64::new(9.0, 0.0)]);
        let v = hpd_half_log_det(&a).unwrap();
        assert!((v - 0.5 * (4.0f64.ln() + 9.0f64.ln())).abs() < 1e-14);
        let not_pd = OperatorMatrix::from_diag(&[C64::new(-1.0, 0.0)]);
        assert!(hpd_half_log_det(&not_pd).is_err());
    }
}
