//! Borel regions of the complex plane used to select spectrum.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat::C64;

/// Membership test with no usable boundary; oracle-only.
#[derive(Clone)]
pub struct PredicateRegion(Arc<dyn Fn(C64) -> bool + Send + Sync>);

impl PredicateRegion {
    pub fn new(f: impl Fn(C64) -> bool + Send + Sync + 'static) -> Self {
        PredicateRegion(Arc::new(f))
    }

    pub fn contains(&self, z: C64) -> bool {
        (self.0)(z)
    }
}

impl fmt::Debug for PredicateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PredicateRegion(..)")
    }
}

#[derive(Clone, Debug)]
pub enum Region {
    Disk { center: C64, radius: f64 },
    DiskComplement { center: C64, radius: f64 },
    /// { z : Re(conj(normal) z) >= offset }, for a nonzero normal.
    HalfPlane { normal: C64, offset: f64 },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
    Predicate(PredicateRegion),
}

impl Region {
    pub fn disk(center: C64, radius: f64) -> Self {
        Region::Disk { center, radius }
    }

    pub fn disk_complement(center: C64, radius: f64) -> Self {
        Region::DiskComplement { center, radius }
    }

    pub fn predicate(f: impl Fn(C64) -> bool + Send + Sync + 'static) -> Self {
        Region::Predicate(PredicateRegion::new(f))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Region::Disk { .. } => "disk",
            Region::DiskComplement { .. } => "disk-complement",
            Region::HalfPlane { .. } => "half-plane",
            Region::Union(_) => "union",
            Region::Intersection(_) => "intersection",
            Region::Complement(_) => "complement",
            Region::Predicate(_) => "predicate",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Disk { radius, .. } | Region::DiskComplement { radius, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "disk radius must be positive and finite, got {radius}"
                    )));
                }
            }
            Region::HalfPlane { normal, .. } => {
                if normal.norm() == 0.0 {
                    return Err(Error::InvalidArgument(
                        "half-plane normal must be nonzero".into(),
                    ));
                }
            }
            Region::Union(parts) | Region::Intersection(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidArgument(
                        "compound region needs at least one part".into(),
                    ));
                }
                for p in parts {
                    p.validate()?;
                }
            }
            Region::Complement(inner) => inner.validate()?,
            Region::Predicate(_) => {}
        }
        Ok(())
    }

    /// Closed-set membership convention: disks include their boundary,
    /// complements are the closed complement of the open disk.
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Disk { center, radius } => (z - center).norm() <= *radius,
            Region::DiskComplement { center, radius } => (z - center).norm() >= *radius,
            Region::HalfPlane { normal, offset } => {
                (z * normal.conj()).re / normal.norm() >= *offset
            }
            Region::Union(parts) => parts.iter().any(|p| p.contains(z)),
            Region::Intersection(parts) => parts.iter().all(|p| p.contains(z)),
            Region::Complement(inner) => !inner.contains(z),
            Region::Predicate(p) => p.contains(z),
        }
    }

    /// Distance from z to the region boundary, when the region has one.
    pub fn boundary_distance(&self, z: C64) -> Option<f64> {
        match self {
            Region::Disk { center, radius } | Region::DiskComplement { center, radius } => {
                Some(((z - center).norm() - radius).abs())
            }
            Region::HalfPlane { normal, offset } => {
                Some(((z * normal.conj()).re / normal.norm() - offset).abs())
            }
            Region::Union(parts) | Region::Intersection(parts) => parts
                .iter()
                .map(|p| p.boundary_distance(z))
                .collect::<Option<Vec<_>>>()
                .map(|ds| ds.into_iter().fold(f64::INFINITY, f64::min)),
            Region::Complement(inner) => inner.boundary_distance(z),
            Region::Predicate(_) => None,
        }
    }

    /// The disk data when the region is a plain disk (the only contour kind).
    pub fn as_disk(&self) -> Option<(C64, f64)> {
        match self {
            Region::Disk { center, radius } => Some((*center, *radius)),
            _ => None,
        }
    }

    pub fn complement(self) -> Region {
        match self {
            Region::Disk { center, radius } => Region::DiskComplement { center, radius },
            Region::DiskComplement { center, radius } => Region::Disk { center, radius },
            Region::Complement(inner) => *inner,
            other => Region::Complement(Box::new(other)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RegionRepr {
    Disk {
        center: C64,
        radius: f64,
    },
    DiskComplement {
        center: C64,
        radius: f64,
    },
    HalfPlane {
        normal: C64,
        offset: f64,
    },
    Union {
        parts: Vec<RegionRepr>,
    },
    Intersection {
        parts: Vec<RegionRepr>,
    },
    Complement {
        inner: Box<RegionRepr>,
    },
}

impl RegionRepr {
    fn from_region(region: &Region) -> std::result::Result<Self, String> {
        Ok(match region {
            Region::Disk { center, radius } => RegionRepr::Disk {
                center: *center,
                radius: *radius,
            },
            Region::DiskComplement { center, radius } => RegionRepr::DiskComplement {
                center: *center,
                radius: *radius,
            },
            Region::HalfPlane { normal, offset } => RegionRepr::HalfPlane {
                normal: *normal,
                offset: *offset,
            },
            Region::Union(parts) => RegionRepr::Union {
                parts: parts
                    .iter()
                    .map(Self::from_region)
                    .collect::<std::result::Result<_, _>>()?,
            },
            Region::Intersection(parts) => RegionRepr::Intersection {
                parts: parts
                    .iter()
                    .map(Self::from_region)
                    .collect::<std::result::Result<_, _>>()?,
            },
            Region::Complement(inner) => RegionRepr::Complement {
                inner: Box::new(Self::from_region(inner)?),
            },
            Region::Predicate(_) => {
                return Err("predicate regions are oracle-only and cannot be serialized".into())
            }
        })
    }

    fn into_region(self) -> Region {
        match self {
            RegionRepr::Disk { center, radius } => Region::Disk { center, radius },
            RegionRepr::DiskComplement { center, radius } => {
                Region::DiskComplement { center, radius }
            }
            RegionRepr::HalfPlane { normal, offset } => Region::HalfPlane { normal, offset },
            RegionRepr::Union { parts } => {
                Region::Union(parts.into_iter().map(Self::into_region).collect())
            }
            RegionRepr::Intersection { parts } => {
                Region::Intersection(parts.into_iter().map(Self::into_region).collect())
            }
            RegionRepr::Complement { inner } => Region::Complement(Box::new(inner.into_region())),
        }
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RegionRepr::from_region(self)
            .map_err(S::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RegionRepr::deserialize(deserializer)?;
        let region = repr.into_region();
        region.validate().map_err(D::Error::custom)?;
        Ok(region)
    }
}
