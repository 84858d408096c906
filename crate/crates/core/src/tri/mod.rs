//! Upper-triangular splitting T = N + Q along a spectral ordering curve,
//! the invariant flag it carries, and flag pinching.

pub mod bounds;
pub mod hilbert;
pub mod pinch;

pub use bounds::{
    commutator_bound_suite, lidskii_check, phi_spectral_decomposition_consistency,
    quasinilpotent_profile, ConsistencyReport, LidskiiReport, SBoundReport,
};
pub use pinch::{pinch, pinch_preserves, Flag, PinchReport};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::Result;
use crate::kernel::{schur, SchurForm};
use crate::mat::{C64, OperatorMatrix, ZERO};
use crate::stats::Window;

/// Total orders on finite sets of complex points. Only the induced order
/// matters: ties are broken by the original position, deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrderingCurve {
    /// Real part, then imaginary part.
    Lexicographic,
    /// Modulus, then argument in [0, 2 pi).
    Spiral,
    /// Position along a Hilbert curve over a bounding square.
    Hilbert {
        window: Option<Window>,
        /// Quantization depth: the square is cut into 2^order cells per axis.
        order: u32,
    },
}

impl OrderingCurve {
    pub fn hilbert_default() -> Self {
        OrderingCurve::Hilbert {
            window: None,
            order: 16,
        }
    }

    /// The comparator induced on a concrete point set. For the Hilbert kind
    /// this fixes the bounding window first; the returned flag says whether a
    /// caller-supplied window had to be expanded to cover the points.
    pub fn comparator(&self, points: &[C64]) -> (impl Fn(&C64, &C64) -> Ordering, bool) {
        let (key_window, order, expanded) = match self {
            OrderingCurve::Hilbert { window, order } => {
                let fitted = fit_window(points);
                match window {
                    Some(w) if points.iter().all(|&z| w.contains(z)) => (Some(*w), *order, false),
                    Some(w) => (Some(union_window(w, &fitted)), *order, true),
                    None => (Some(fitted), *order, false),
                }
            }
            _ => (None, 0, false),
        };
        let kind = self.clone();
        let cmp = move |a: &C64, b: &C64| -> Ordering {
            match kind {
                OrderingCurve::Lexicographic => (a.re, a.im)
                    .partial_cmp(&(b.re, b.im))
                    .unwrap_or(Ordering::Equal),
                OrderingCurve::Spiral => (a.norm(), positive_arg(*a))
                    .partial_cmp(&(b.norm(), positive_arg(*b)))
                    .unwrap_or(Ordering::Equal),
                OrderingCurve::Hilbert { .. } => {
                    let w = key_window.as_ref().expect("window fixed above");
                    hilbert_key(*a, w, order).cmp(&hilbert_key(*b, w, order))
                }
            }
        };
        (cmp, expanded)
    }
}

fn positive_arg(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn fit_window(points: &[C64]) -> Window {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for &z in points {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if points.is_empty() {
        return Window::new(-1.0, 1.0, -1.0, 1.0);
    }
    // A square window with 5% padding keeps boundary points interior.
    let cx = 0.5 * (x0 + x1);
    let cy = 0.5 * (y0 + y1);
    let half = 0.525 * (x1 - x0).max(y1 - y0).max(1e-9);
    Window::new(cx - half, cx + half, cy - half, cy + half)
}

fn union_window(a: &Window, b: &Window) -> Window {
    Window::new(
        a.x0.min(b.x0),
        a.x1.max(b.x1),
        a.y0.min(b.y0),
        a.y1.max(b.y1),
    )
}

fn hilbert_key(z: C64, w: &Window, order: u32) -> u64 {
    let side = (1u64 << order) as f64;
    let qx = (((z.re - w.x0) / w.width()) * side).floor().clamp(0.0, side - 1.0) as u64;
    let qy = (((z.im - w.y0) / w.height()) * side).floor().clamp(0.0, side - 1.0) as u64;
    hilbert::hilbert_index(order, qx, qy)
}

/// The ordered Schur data of T = N + Q: N = U diag(R) U* is normal with the
/// spectrum of T, Q = U strict(R) U* is nilpotent, and every leading span of
/// U is T-invariant.
#[derive(Clone, Debug)]
pub struct SchurSplit {
    pub schur: SchurForm,
    pub normal: OperatorMatrix,
    pub nilpotent: OperatorMatrix,
    /// Set when a caller-supplied Hilbert window had to be expanded.
    pub window_expanded: bool,
}

impl SchurSplit {
    pub fn dim(&self) -> usize {
        self.schur.dim()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.schur.eigenvalues()
    }

    /// q_k: projector onto the span of the leading k Schur vectors.
    pub fn flag_projection(&self, k: usize) -> OperatorMatrix {
        self.schur.leading_projector(k)
    }

    /// The full flag (every cut), as a pinching flag.
    pub fn full_flag(&self) -> Flag {
        let n = self.dim();
        Flag::from_basis(self.schur.unitary.clone(), (1..=n).collect())
            .expect("Schur basis is unitary")
    }

    /// A coarser flag using only the given cumulative cuts.
    pub fn flag_with_cuts(&self, mut cuts: Vec<usize>) -> Result<Flag> {
        let n = self.dim();
        if cuts.last() != Some(&n) {
            cuts.push(n);
        }
        Flag::from_basis(self.schur.unitary.clone(), cuts)
    }

    /// |N N* - N* N|: zero for an exactly normal part.
    pub fn normality_defect(&self) -> f64 {
        let n = &self.normal;
        let na = n.adjoint();
        (&(n * &na) - &(&na * n)).fro_norm()
    }

    pub fn reconstruction_defect(&self, t: &OperatorMatrix) -> f64 {
        (&(&self.normal + &self.nilpotent) - t).fro_norm()
    }
}

/// Splits T along the ordering curve.
pub fn split(t: &OperatorMatrix, curve: &OrderingCurve, _tol: &Tolerances) -> Result<SchurSplit> {
    let mut form = schur(t)?;
    let eigenvalues = form.eigenvalues();
    let (cmp, window_expanded) = curve.comparator(&eigenvalues);
    form.reorder_by(&mut |a, b| cmp(a, b));

    let n = t.dim();
    let diag = OperatorMatrix::from_diag(&form.eigenvalues());
    let strict = {
        let mut s = form.triangular.clone();
        for i in 0..n {
            s[(i, i)] = ZERO;
        }
        s
    };
    let u = &form.unitary;
    let ua = u.adjoint();
    let normal = &(u * &diag) * &ua;
    let nilpotent = &(u * &strict) * &ua;
    Ok(SchurSplit {
        schur: form,
        normal,
        nilpotent,
        window_expanded,
    })
}
