//! Complex Schur decomposition T = U R U* with caller-controlled eigenvalue order.
//!
//! Hessenberg reduction by Householder reflectors, then explicit single-shift
//! QR iteration with Givens rotations. Reordering moves eigenvalues by unitary
//! swaps of adjacent diagonal entries, never through eigenvector bases, so
//! defective matrices are handled.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::mat::{C64, OperatorMatrix, ONE, ZERO};

/// Unitary/triangular factorization with the triangular diagonal exposed.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub unitary: OperatorMatrix,
    pub triangular: OperatorMatrix,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.triangular.dim()
    }

    /// Diagonal of R in triangularization order.
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.triangular.diagonal()
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        let ur = &self.unitary * &self.triangular;
        &ur * &self.unitary.adjoint()
    }

    pub fn unitarity_defect(&self) -> f64 {
        (&self.unitary.adjoint() * &self.unitary).dist_to_identity()
    }

    /// Orthogonal projector onto the span of the first k Schur vectors.
    pub fn leading_projector(&self, k: usize) -> OperatorMatrix {
        let n = self.dim();
        let cols = self.unitary.columns(0, k);
        OperatorMatrix::projector_from_columns(&cols, n)
    }

    /// Compression of the source operator to the leading k Schur vectors,
    /// i.e. the top-left k x k block of R.
    pub fn leading_block(&self, k: usize) -> Vec<Vec<C64>> {
        (0..k)
            .map(|i| (0..k).map(|j| self.triangular[(i, j)]).collect())
            .collect()
    }

    /// Reorders the diagonal by `cmp` via adjacent unitary swaps.
    /// Equal eigenvalues keep their original relative position.
    pub fn reorder_by(&mut self, cmp: &mut dyn FnMut(&C64, &C64) -> Ordering) {
        let n = self.dim();
        let diag = self.triangular.diagonal();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cmp(&diag[a], &diag[b]));

        let mut cur: Vec<usize> = (0..n).collect();
        for target in 0..n {
            let want = order[target];
            let mut pos = cur.iter().position(|&x| x == want).expect("index present");
            while pos > target {
                swap_adjacent(&mut self.triangular, &mut self.unitary, pos - 1);
                cur.swap(pos - 1, pos);
                pos -= 1;
            }
        }
    }
}

/// Schur decomposition in the order the QR iteration produces.
pub fn schur(t: &OperatorMatrix) -> Result<SchurForm> {
    t.check_finite()?;
    let n = t.dim();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut h = t.clone();
    let mut u = OperatorMatrix::identity(n);
    hessenberg(&mut h, &mut u);
    qr_iterate(&mut h, &mut u)?;
    // The iteration drives the strict lower part below the deflation
    // threshold; the stored form has it exactly zero.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(SchurForm {
        unitary: u,
        triangular: h,
    })
}

/// Schur decomposition with the diagonal sorted by `cmp` (stable in ties).
pub fn schur_ordered(
    t: &OperatorMatrix,
    mut cmp: impl FnMut(&C64, &C64) -> Ordering,
) -> Result<SchurForm> {
    let mut form = schur(t)?;
    form.reorder_by(&mut cmp);
    Ok(form)
}

/// Eigenvalues of T (diagonal of an unordered Schur form).
pub fn eigenvalues(t: &OperatorMatrix) -> Result<Vec<C64>> {
    Ok(schur(t)?.eigenvalues())
}

fn hessenberg(h: &mut OperatorMatrix, u: &mut OperatorMatrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = crate::mat::norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] = x0 - alpha;
        let vnorm = crate::mat::norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Rows k+1.. of columns k.. : H <- (I - 2vv*) H
        for j in k..n {
            let mut acc = ZERO;
            for (r, vi) in v.iter().enumerate() {
                acc += vi.conj() * h[(k + 1 + r, j)];
            }
            let acc2 = acc * 2.0;
            for (r, vi) in v.iter().enumerate() {
                let d = vi * acc2;
                h[(k + 1 + r, j)] -= d;
            }
        }
        // Columns k+1.. of all rows : H <- H (I - 2vv*)
        for i in 0..n {
            let mut acc = ZERO;
            for (c, vi) in v.iter().enumerate() {
                acc += h[(i, k + 1 + c)] * vi;
            }
            let acc2 = acc * 2.0;
            for (c, vi) in v.iter().enumerate() {
                let d = acc2 * vi.conj();
                h[(i, k + 1 + c)] -= d;
            }
        }
        for i in 0..n {
            let mut acc = ZERO;
            for (c, vi) in v.iter().enumerate() {
                acc += u[(i, k + 1 + c)] * vi;
            }
            let acc2 = acc * 2.0;
            for (c, vi) in v.iter().enumerate() {
                let d = acc2 * vi.conj();
                u[(i, k + 1 + c)] -= d;
            }
        }
    }
}

/// Complex Givens rotation: returns (c, s) with c real so that
/// [c, s; -conj(s), c] * [f; g] = [r; 0].
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g == ZERO {
        return (1.0, ZERO);
    }
    if f == ZERO {
        return (0.0, g.conj() / g.norm());
    }
    let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = f.norm() / d;
    let s = (f / f.norm()) * g.conj() / d;
    (c, s)
}

fn qr_iterate(h: &mut OperatorMatrix, u: &mut OperatorMatrix) -> Result<()> {
    let n = h.dim();
    let scale = h.fro_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut local_iters = 0usize;
    let mut total_iters = 0usize;
    let budget = 80 * n.max(4);

    while hi > 0 {
        // Locate the window [lo, hi] with negligible coupling below lo.
        let mut lo = hi;
        while lo > 0 {
            let off = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let threshold = if local > 0.0 {
                eps * local
            } else {
                eps * scale
            };
            if off <= threshold {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            local_iters = 0;
            continue;
        }

        total_iters += 1;
        local_iters += 1;
        if total_iters > budget {
            return Err(Error::EigenNonConvergence {
                n,
                iterations: total_iters,
                residual: h[(hi, hi - 1)].norm(),
                scale,
            });
        }

        let shift = if local_iters % 14 == 0 {
            // Exceptional shift to break rare cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            rotations.push((c, s));
            // Rows i, i+1 over columns i..n.
            for j in i..n {
                let a = h[(i, j)];
                let b = h[(i + 1, j)];
                h[(i, j)] = a * c + s * b;
                h[(i + 1, j)] = -s.conj() * a + b * c;
            }
            h[(i + 1, i)] = ZERO;
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let i = lo + idx;
            // Columns i, i+1 over rows 0..=min(i+1, hi) plus Hessenberg fill.
            let row_hi = (i + 2).min(n);
            for r in 0..row_hi {
                let a = h[(r, i)];
                let b = h[(r, i + 1)];
                h[(r, i)] = a * c + b * s.conj();
                h[(r, i + 1)] = -a * s + b * c;
            }
            for r in 0..n {
                let a = u[(r, i)];
                let b = u[(r, i + 1)];
                u[(r, i)] = a * c + b * s.conj();
                u[(r, i + 1)] = -a * s + b * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(())
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let e1 = tr_half + root;
    let e2 = tr_half - root;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Swaps the eigenvalues at positions k and k+1 of an upper triangular R by a
/// unitary similarity, updating U alongside.
fn swap_adjacent(r: &mut OperatorMatrix, u: &mut OperatorMatrix, k: usize) {
    let n = r.dim();
    let l1 = r[(k, k)];
    let l2 = r[(k + 1, k + 1)];
    let t = r[(k, k + 1)];
    let gap = l2 - l1;
    let vnorm = (t.norm_sqr() + gap.norm_sqr()).sqrt();
    if vnorm == 0.0 {
        // Numerically identical eigenvalues with no coupling: nothing to move.
        return;
    }
    let c = t / vnorm;
    let s = gap / vnorm;
    // W = [c, -conj(s); s, conj(c)], W e1 is the eigenvector of the 2x2 block
    // for l2; the similarity W* R W puts l2 first.
    // Rows k, k+1 with W*.
    for j in 0..n {
        let a = r[(k, j)];
        let b = r[(k + 1, j)];
        r[(k, j)] = c.conj() * a + s.conj() * b;
        r[(k + 1, j)] = -s * a + c * b;
    }
    // Columns k, k+1 with W.
    for i in 0..n {
        let a = r[(i, k)];
        let b = r[(i, k + 1)];
        r[(i, k)] = a * c + b * s;
        r[(i, k + 1)] = -a * s.conj() + b * c.conj();
    }
    for i in 0..n {
        let a = u[(i, k)];
        let b = u[(i, k + 1)];
        u[(i, k)] = a * c + b * s;
        u[(i, k + 1)] = -a * s.conj() + b * c.conj();
    }
    r[(k + 1, k)] = ZERO;
}

/// Ascending-modulus comparator with deterministic tie handling.
pub fn ascending_modulus(a: &C64, b: &C64) -> Ordering {
    a.norm()
        .partial_cmp(&b.norm())
        .unwrap_or(Ordering::Equal)
}
