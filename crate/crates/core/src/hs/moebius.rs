//! Fractional linear transformations acting on operators and disk regions.

use crate::error::{Error, Result};
use crate::hs::region::Region;
use crate::kernel::solve_right;
use crate::mat::{C64, OperatorMatrix};

/// gamma(z) = (a z + b) / (c z + d), with a d - b c != 0.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Moebius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Moebius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(Error::InvalidArgument(
                "Moebius transform requires ad - bc != 0".into(),
            ));
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Moebius {
            a: C64::new(1.0, 0.0),
            b: C64::new(0.0, 0.0),
            c: C64::new(0.0, 0.0),
            d: C64::new(1.0, 0.0),
        }
    }

    pub fn affine(scale: C64, shift: C64) -> Result<Self> {
        Self::new(scale, shift, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn inversion() -> Self {
        Moebius {
            a: C64::new(0.0, 0.0),
            b: C64::new(1.0, 0.0),
            c: C64::new(1.0, 0.0),
            d: C64::new(0.0, 0.0),
        }
    }

    pub fn is_affine(&self) -> bool {
        self.c.norm() == 0.0
    }

    /// The preimage of infinity, when there is one.
    pub fn pole(&self) -> Option<C64> {
        if self.is_affine() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// gamma(T) = (a T + b)(c T + d)^-1.
    pub fn apply_matrix(&self, t: &OperatorMatrix) -> Result<OperatorMatrix> {
        let n = t.dim();
        let numerator = {
            let mut m = t.scale(self.a);
            for i in 0..n {
                m[(i, i)] += self.b;
            }
            m
        };
        if self.is_affine() {
            let inv_d = self.d.inv();
            return Ok(numerator.scale(inv_d));
        }
        let denominator = {
            let mut m = t.scale(self.c);
            for i in 0..n {
                m[(i, i)] += self.d;
            }
            m
        };
        solve_right(&numerator, &denominator).map_err(|_| Error::SingularDenominator)
    }

    /// Image of a disk or disk-complement region. The boundary circle must
    /// avoid the pole (infinity stays off the image boundary).
    pub fn map_region(&self, region: &Region) -> Result<Region> {
        let (center, radius, inside) = match region {
            Region::Disk { center, radius } => (*center, *radius, true),
            Region::DiskComplement { center, radius } => (*center, *radius, false),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "Moebius transport only maps disks and disk complements, got {}",
                    other.kind()
                )))
            }
        };
        if let Some(pole) = self.pole() {
            let to_boundary = ((pole - center).norm() - radius).abs();
            if to_boundary < 1e-12 * radius.max(1.0) {
                return Err(Error::InvalidArgument(
                    "Moebius pole lies on the region boundary".into(),
                ));
            }
        }
        let (c1, r1, inside1) = if self.is_affine() {
            let factor = self.a / self.d;
            (
                self.apply(center),
                factor.norm() * radius,
                inside,
            )
        } else {
            // Decompose as affine(inversion(affine)): w = c z + d, u = 1/w,
            // gamma = (a/c) + ((b c - a d)/c) u.
            let w_center = self.c * center + self.d;
            let w_radius = self.c.norm() * radius;
            let (u_center, u_radius, u_inside) = invert_circle(w_center, w_radius, inside);
            let coeff = (self.b * self.c - self.a * self.d) / self.c;
            (
                self.a / self.c + coeff * u_center,
                coeff.norm() * u_radius,
                u_inside,
            )
        };
        Ok(if inside1 {
            Region::Disk {
                center: c1,
                radius: r1,
            }
        } else {
            Region::DiskComplement {
                center: c1,
                radius: r1,
            }
        })
    }
}

/// Image of the circle |z - c| = r (and the marked side) under z -> 1/z.
/// The circle must not pass through the origin.
fn invert_circle(c: C64, r: f64, inside: bool) -> (C64, f64, bool) {
    let denom = c.norm_sqr() - r * r;
    debug_assert!(denom.abs() > 0.0, "circle through the origin");
    let center = c.conj() / denom;
    let radius = r / denom.abs();
    // When 0 lies inside the source disk the marked side flips across the
    // image circle (0 maps to infinity).
    let origin_inside = c.norm() < r;
    let flipped = if origin_inside { !inside } else { inside };
    (center, radius, flipped)
}
