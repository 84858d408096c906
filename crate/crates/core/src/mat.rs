//! Dense complex matrices with the normalized trace convention tau = trace / n.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major storage.
#[derive(Clone, PartialEq, Serialize)]
pub struct OperatorMatrix {
    n: usize,
    data: Vec<C64>,
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            data: Vec<C64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.n == 0 || raw.data.len() != raw.n * raw.n {
            return Err(serde::de::Error::custom(format!(
                "matrix payload has {} entries for dimension {}",
                raw.data.len(),
                raw.n
            )));
        }
        let m = OperatorMatrix {
            n: raw.n,
            data: raw.data,
        };
        m.check_finite()
            .map_err(|e| serde::de::Error::custom(e.to_string()))?;
        Ok(m)
    }
}

impl OperatorMatrix {
    pub fn zeros(n: usize) -> Self {
        OperatorMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows, validating shape and finiteness.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let m = OperatorMatrix { n, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Convenience constructor from real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Normalized trace `trace / n`; tau(I) = 1.
    pub fn tau(&self) -> C64 {
        self.trace() / self.n as f64
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Hermitian part (A + A*) / 2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Skew part (A - A*) / (2i), itself Hermitian.
    pub fn skew_part(&self) -> Self {
        let half_over_i = C64::new(0.0, -0.5);
        Self::from_fn(self.n, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * half_over_i
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= z;
        }
        out
    }

    /// T - lambda * I.
    pub fn shifted(&self, lambda: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] -= lambda;
        }
        out
    }

    /// z * I - T, the resolvent argument.
    pub fn resolvent_argument(&self, z: C64) -> Self {
        let mut out = self.scale(C64::new(-1.0, 0.0));
        for i in 0..self.n {
            out[(i, i)] += z;
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm estimate by power iteration on T*T.
    ///
    /// Accurate to a few digits, which is all tolerance scaling needs;
    /// exact spectral norms go through the SVD.
    pub fn op_norm_est(&self) -> f64 {
        let n = self.n;
        let fro = self.fro_norm();
        if fro == 0.0 {
            return 0.0;
        }
        let mut v: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + (i as f64) / (n as f64 + 1.0), 0.3 * i as f64 / (n as f64)))
            .collect();
        normalize(&mut v);
        let mut sigma2 = 0.0f64;
        for _ in 0..60 {
            let w = self.mul_vec(&v);
            let mut u = self.adjoint_mul_vec(&w);
            let next = norm(&u);
            if next == 0.0 {
                return 0.0;
            }
            for x in &mut u {
                *x /= next;
            }
            let rel = (next - sigma2).abs() / next.max(1e-300);
            v = u;
            sigma2 = next;
            if rel < 1e-12 {
                break;
            }
        }
        sigma2.sqrt().min(fro)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![ZERO; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = ZERO;
            for j in 0..n {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint_mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![ZERO; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let vi = v[i];
            for j in 0..n {
                out[j] += row[j].conj() * vi;
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += a * rhs_row[j];
                }
            }
        }
        out
    }

    /// Frobenius distance to the identity.
    pub fn dist_to_identity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { ONE } else { ZERO };
                acc += (self[(i, j)] - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).fro_norm() <= tol
    }

    /// Extracts columns `lo..hi` as vectors.
    pub fn columns(&self, lo: usize, hi: usize) -> Vec<Vec<C64>> {
        (lo..hi)
            .map(|j| (0..self.n).map(|i| self[(i, j)]).collect())
            .collect()
    }

    /// Builds the n x k column block as a projector factor: P = B B*.
    pub fn projector_from_columns(cols: &[Vec<C64>], n: usize) -> Self {
        let mut p = Self::zeros(n);
        for col in cols {
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        p
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalize(v: &mut [C64]) {
    let nv = norm(v);
    if nv > 0.0 {
        for z in v.iter_mut() {
            *z /= nv;
        }
    }
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.n, rhs.n);
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        OperatorMatrix { n: self.n, data }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.n, rhs.n);
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        OperatorMatrix { n: self.n, data }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
