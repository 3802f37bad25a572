//! Lines of real projective 3-space as points of the exterior square.
//!
//! A line through two projective points is the exterior product of any two
//! representatives, a six-component quantity defined up to scale. The image
//! of the construction is exactly the null cone of the split pairing
//! [`pl_inner`](crate::linalg::pl_inner) — the classical quadratic relation
//! `p01 p23 + p02 p31 + p03 p12 = 0` — and projective transformations act on
//! it through [`wedge2_matrix`](crate::linalg::wedge2_matrix), preserving
//! the pairing up to the determinant.

use crate::linalg::{wedge, Vec4R, Wedge6};

/// Representatives shorter than this cannot reliably name a projective point.
pub const POINT_FLOOR: f64 = 1e-12;
/// Exterior products shorter than this mean the two points coincide (or
/// nearly so) and span no line.
pub const LINE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum PluckerError {
    #[error("homogeneous vector of norm {norm:.3e} is too short to represent a point")]
    ZeroVector { norm: f64 },
    #[error("points are too close to proportional to span a line (wedge norm {norm:.3e})")]
    DegenerateLine { norm: f64 },
}

/// A point of real projective 3-space, stored as an unnormalized
/// representative of verified nonzero length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint(Vec4R);

impl ProjPoint {
    pub fn new(v: Vec4R) -> Result<Self, PluckerError> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < POINT_FLOOR {
            return Err(PluckerError::ZeroVector { norm });
        }
        Ok(ProjPoint(v))
    }

    pub fn rep(&self) -> &Vec4R {
        &self.0
    }
}

/// The line joining two projective points, as a representative in the
/// exterior square. Errors when the points (nearly) coincide.
pub fn line_through(a: &ProjPoint, b: &ProjPoint) -> Result<Wedge6, PluckerError> {
    let w = wedge(a.rep(), b.rep());
    let norm = w.norm();
    if norm < LINE_FLOOR {
        return Err(PluckerError::DegenerateLine { norm });
    }
    Ok(w)
}

/// Residual of the quadratic line relation,
/// `|p01 p23 + p02 p31 + p03 p12|` — equivalently half of
/// `|pl_inner(w, w)|`. Zero exactly on exterior products of vectors.
pub fn plucker_relation_residual(w: &Wedge6) -> f64 {
    let c = &w.c;
    (c[0] * c[5] + c[1] * c[4] + c[2] * c[3]).abs()
}
