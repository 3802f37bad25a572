//! Quadric-valued Gauss maps, the invariant metric on the space of quadrics,
//! and conformality diagnostics.
//!
//! A frame field induces two grids of real symmetric 4x4 matrices,
//!
//! * `g1 = (L F) J1 (L F)^T = Fhat J1hat Fhat^T`, and
//! * `g2 = -(L F) J2 (L F)^T = Fhat J2hat Fhat^T`,
//!
//! each of determinant -1 and Lorentz signature (3, 1), representing
//! quadrics of the ambient projective space. The space of such quadrics
//! carries the invariant semi-Riemannian metric
//! `<X, Y>_Q = Tr(Q^-1 X Q^-1 Y)`, and in that metric the maps satisfy
//! closed-form first-derivative identities: with the coefficient data
//! `(b, p)` and derived invariants `(k, P)`,
//!
//! * `<d_z g1, d_z g1> = 16 P` and `<d_z g1, d_zb g1> = 8 (k + conj k) + 4 |b|^2`,
//! * `<d_z g2, d_z g2> = 0` and `<d_z g2, d_zb g2> = 4 |b|^2`,
//!
//! so the second map is always conformal while the first is conformal
//! exactly on Demoulin data. [`conformality_report`] confronts finite
//! differences of the quadric grids with these values and with the exact
//! derivative matrices `d_z g = +-(L F)(U J + J U^T)(L F)^T`.
//!
//! [`primitive_lift_at`] realizes the first map as the projection of a lift
//! `F (E J1) F^T` taking values in an orbit with a one-complex-parameter
//! stabilizer fixed by the order-6 twist.

use num_complex::Complex64;

use crate::frame::{realify, FrameField};
use crate::linalg::{constants, signature4, LinalgError, Mat4C};
use crate::surface::{DerivedData, Grid, GridSpec, SurfaceData, SurfaceError};

/// How real a realified quadric must be: the largest tolerated imaginary
/// part, dominated by frame integration error.
pub const REALITY_TOL: f64 = 1e-7;
/// Symmetry gate for quadric representatives.
pub const QUADRIC_SYMMETRY_TOL: f64 = 1e-9;
/// How far `|det Q|` may drift from one (the frames are unimodular, so the
/// representatives need no rescaling).
pub const QUADRIC_DET_TOL: f64 = 1e-7;
/// Below this `|det Q|` a representative is considered degenerate.
pub const DEGENERATE_FLOOR: f64 = 1e-12;

/// Errors from quadric construction and the metric.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadricError {
    #[error("quadric grid is not real: largest imaginary part {max_imag:.3e} exceeds {tol:.0e}")]
    NotReal { max_imag: f64, tol: f64 },
    #[error("quadric is not symmetric: defect {defect:.3e} exceeds {tol:.0e}")]
    NotSymmetric { defect: f64, tol: f64 },
    #[error("quadric is degenerate: |det| = {det:.3e}")]
    Degenerate { det: f64 },
    #[error("|det Q| = {det} is not 1 within {tol:.0e}")]
    WrongDeterminant { det: f64, tol: f64 },
    #[error("quadric has signature ({plus}, {minus}), expected (3, 1)")]
    WrongSignature { plus: usize, minus: usize },
    #[error("grid is too small for the stencil: need {need} interior margin, have {nx} x {ny} nodes")]
    GridTooSmall { need: usize, nx: usize, ny: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Frame(#[from] crate::frame::FrameError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Which of the two quadric-valued maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussMap {
    First,
    Second,
}

impl GaussMap {
    /// The constant representative at the base node (where `F = I`).
    pub fn base_quadric(self) -> Mat4C {
        match self {
            GaussMap::First => constants::j1_hat(),
            GaussMap::Second => constants::j2_hat(),
        }
    }

    /// Sign `s` in `g = s (L F) J (L F)^T`.
    fn sign(self) -> f64 {
        match self {
            GaussMap::First => 1.0,
            GaussMap::Second => -1.0,
        }
    }

    fn j(self) -> Mat4C {
        match self {
            GaussMap::First => constants::j1(),
            GaussMap::Second => constants::j2(),
        }
    }
}

/// One real symmetric quadric representative (un-rescaled; unimodular frames
/// keep `|det| = 1` automatically).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricPoint {
    pub q: [[f64; 4]; 4],
}

impl QuadricPoint {
    pub fn as_mat(&self) -> Mat4C {
        Mat4C::from_real(&self.q)
    }

    /// Largest entrywise deviation from symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.q[i][j] - self.q[j][i]).abs());
            }
        }
        worst
    }

    pub fn det(&self) -> f64 {
        self.as_mat().det().re
    }

    /// Check the contract for a quadric representative: symmetric, unit
    /// `|det|`, signature (3, 1).
    pub fn validate(&self) -> Result<(), QuadricError> {
        let defect = self.symmetry_defect();
        if defect > QUADRIC_SYMMETRY_TOL {
            return Err(QuadricError::NotSymmetric {
                defect,
                tol: QUADRIC_SYMMETRY_TOL,
            });
        }
        let det = self.det();
        if det.abs() < DEGENERATE_FLOOR {
            return Err(QuadricError::Degenerate { det });
        }
        if (det.abs() - 1.0).abs() > QUADRIC_DET_TOL {
            return Err(QuadricError::WrongDeterminant {
                det,
                tol: QUADRIC_DET_TOL,
            });
        }
        let (plus, minus) = signature4(&self.q)?;
        if (plus, minus) != (3, 1) {
            return Err(QuadricError::WrongSignature { plus, minus });
        }
        Ok(())
    }
}

/// A grid of quadric representatives produced from a frame field.
#[derive(Debug, Clone)]
pub struct QuadricField {
    pub which: GaussMap,
    pub points: Grid<QuadricPoint>,
    pub spec: GridSpec,
    /// Largest imaginary part discarded when taking real representatives.
    pub max_imag: f64,
}

/// Evaluate a quadric-valued map on a frame field: realify the frames and
/// form `Fhat Jhat Fhat^T` nodewise. Errors if the result fails the reality
/// gate ([`REALITY_TOL`]).
pub fn gauss_map(ff: &FrameField, which: GaussMap) -> Result<QuadricField, QuadricError> {
    let rf = realify(ff);
    let jhat = which.base_quadric();
    let mut max_imag: f64 = 0.0;
    let points = Grid::from_fn(ff.spec.nx, ff.spec.ny, |i, j| {
        let hat = rf.frames.at(i, j);
        let qc = *hat * jhat * hat.transpose();
        max_imag = max_imag.max(qc.max_imag());
        QuadricPoint { q: qc.real_part() }
    });
    if max_imag > REALITY_TOL {
        return Err(QuadricError::NotReal {
            max_imag,
            tol: REALITY_TOL,
        });
    }
    Ok(QuadricField {
        which,
        points,
        spec: ff.spec,
        max_imag,
    })
}

/// The invariant metric at `Q`: `<X, Y>_Q = Tr(Q^-1 X Q^-1 Y)`. Tangent
/// vectors may be complex (e.g. `d_z` derivatives), hence the complex value.
pub fn metric_at(q: &QuadricPoint, x: &Mat4C, y: &Mat4C) -> Result<Complex64, QuadricError> {
    let q_inv = q.as_mat().inverse()?;
    Ok((q_inv * *x * q_inv * *y).trace())
}

// ---------------------------------------------------------------------------
// Conformality diagnostics.
// ---------------------------------------------------------------------------

/// Finite-difference scheme for derivatives of the quadric grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    /// Second-order central differences (the default; needs one ring of
    /// neighbours).
    Central2,
    /// Fourth-order central differences (Richardson of two central stencils;
    /// needs two rings and roughly squares the accuracy on smooth data).
    Richardson4,
}

impl FdScheme {
    /// Interior margin the stencil needs on every side.
    pub fn margin(self) -> usize {
        match self {
            FdScheme::Central2 => 1,
            FdScheme::Richardson4 => 2,
        }
    }
}

/// One interior node's comparison of finite differences against the closed
/// forms: the values of `<d_z g, d_z g>` and `<d_z g, d_zb g>`, plus the
/// Frobenius deviations of the differentiated matrices themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalityRow {
    pub node: (f64, f64),
    pub fd_zz: Complex64,
    pub closed_zz: Complex64,
    pub fd_zzb: Complex64,
    pub closed_zzb: Complex64,
    pub matrix_z_dev: f64,
    pub matrix_zb_dev: f64,
}

/// Conformality diagnostics over all interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalityReport {
    pub which: GaussMap,
    pub scheme: FdScheme,
    pub rows: Vec<ConformalityRow>,
    /// `sup |fd_zz - closed_zz|`.
    pub sup_zz: f64,
    /// `sup |fd_zzb - closed_zzb|`.
    pub sup_zzb: f64,
    /// Sup of the Frobenius deviation of the finite-difference `d_z g` from
    /// the exact derivative matrix `s (L F)(U J + J U^T)(L F)^T`.
    pub sup_matrix_z: f64,
    /// Same for `d_zb g` against `s (L F)(V J + J V^T)(L F)^T`.
    pub sup_matrix_zb: f64,
}

fn fd_axis(
    points: &Grid<QuadricPoint>,
    i: usize,
    j: usize,
    axis: (usize, usize),
    h: f64,
    scheme: FdScheme,
) -> Mat4C {
    let at = |di: i64, dj: i64| {
        let ii = (i as i64 + di) as usize;
        let jj = (j as i64 + dj) as usize;
        points.at(ii, jj).as_mat()
    };
    let (ax, ay) = (axis.0 as i64, axis.1 as i64);
    match scheme {
        FdScheme::Central2 => {
            (at(ax, ay) - at(-ax, -ay)).scale(Complex64::new(1.0 / (2.0 * h), 0.0))
        }
        FdScheme::Richardson4 => {
            let num = (at(ax, ay) - at(-ax, -ay)).scale(Complex64::new(8.0, 0.0))
                - (at(2 * ax, 2 * ay) - at(-2 * ax, -2 * ay));
            num.scale(Complex64::new(1.0 / (12.0 * h), 0.0))
        }
    }
}

/// Compare finite differences of a quadric grid with the closed-form first
/// derivatives, nodewise on the interior. `ff` must be the frame field the
/// quadric grid was produced from (it supplies the exact `L F` factors and
/// the connection).
pub fn conformality_report(
    sd: &SurfaceData,
    dd: &DerivedData,
    ff: &FrameField,
    qf: &QuadricField,
    scheme: FdScheme,
) -> Result<ConformalityReport, QuadricError> {
    let spec = qf.spec;
    let m = scheme.margin();
    if spec.nx < 2 * m + 1 || spec.ny < 2 * m + 1 {
        return Err(QuadricError::GridTooSmall {
            need: m,
            nx: spec.nx,
            ny: spec.ny,
        });
    }
    let l = constants::l();
    let j = qf.which.j();
    let s = Complex64::new(qf.which.sign(), 0.0);
    let half = Complex64::new(0.5, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    let pi = Complex64::new(0.0, 1.0);
    let mut rows = Vec::new();
    let mut sup_zz: f64 = 0.0;
    let mut sup_zzb: f64 = 0.0;
    let mut sup_matrix_z: f64 = 0.0;
    let mut sup_matrix_zb: f64 = 0.0;
    for jj in m..spec.ny - m {
        for ii in m..spec.nx - m {
            let z = spec.z_at(ii, jj);
            // Finite differences of the real quadric grid, combined into
            // Wirtinger derivatives.
            let dx = fd_axis(&qf.points, ii, jj, (1, 0), spec.h, scheme);
            let dy = fd_axis(&qf.points, ii, jj, (0, 1), spec.h, scheme);
            let g_z = (dx + dy.scale(mi)).scale(half);
            let g_zb = (dx + dy.scale(pi)).scale(half);
            // Exact derivative matrices from the connection.
            let (u, v) = crate::frame::uv_at(sd, dd, z)?;
            let lf = l * *ff.frames.at(ii, jj);
            let exact_z = (lf * (u * j + j * u.transpose()) * lf.transpose()).scale(s);
            let exact_zb = (lf * (v * j + j * v.transpose()) * lf.transpose()).scale(s);
            let matrix_z_dev = (g_z - exact_z).norm();
            let matrix_zb_dev = (g_zb - exact_zb).norm();
            sup_matrix_z = sup_matrix_z.max(matrix_z_dev);
            sup_matrix_zb = sup_matrix_zb.max(matrix_zb_dev);
            // Scalar closed forms.
            let q = qf.points.at(ii, jj);
            let fd_zz = metric_at(q, &g_z, &g_z)?;
            let fd_zzb = metric_at(q, &g_z, &g_zb)?;
            let ev = |f: &wirtexpr::CoeffField| {
                f.eval(0, 0, z).map_err(|source| SurfaceError::Pole {
                    field: "derived",
                    source,
                })
            };
            let b = ev(&sd.b)?;
            let k = ev(&dd.k)?;
            let p_cap = ev(&dd.cap_p)?;
            let (closed_zz, closed_zzb) = match qf.which {
                GaussMap::First => (
                    16.0 * p_cap,
                    Complex64::new(16.0 * k.re + 4.0 * b.norm_sqr(), 0.0),
                ),
                GaussMap::Second => (
                    Complex64::new(0.0, 0.0),
                    Complex64::new(4.0 * b.norm_sqr(), 0.0),
                ),
            };
            sup_zz = sup_zz.max((fd_zz - closed_zz).norm());
            sup_zzb = sup_zzb.max((fd_zzb - closed_zzb).norm());
            rows.push(ConformalityRow {
                node: (spec.x_at(ii), spec.y_at(jj)),
                fd_zz,
                closed_zz,
                fd_zzb,
                closed_zzb,
                matrix_z_dev,
                matrix_zb_dev,
            });
        }
    }
    Ok(ConformalityReport {
        which: qf.which,
        scheme,
        rows,
        sup_zz,
        sup_zzb,
        sup_matrix_z,
        sup_matrix_zb,
    })
}

// ---------------------------------------------------------------------------
// The primitive lift of the first map.
// ---------------------------------------------------------------------------

/// The lift value at one frame: `F (E J1) F^T`, a complex symmetric matrix
/// moving in the orbit of `E J1`.
pub fn primitive_lift_at(f: &Mat4C) -> Mat4C {
    let ej1 = constants::e_twist() * constants::j1();
    *f * ej1 * f.transpose()
}

/// The projection of the lift back to the first quadric map, before the
/// realifying basis change: `pi(lift) = F J1 F^T`, so that
/// `L pi L^T = g1`.
pub fn primitive_project_at(f: &Mat4C) -> Mat4C {
    let j1 = constants::j1();
    *f * j1 * f.transpose()
}

/// A generator of the lift's stabilizer: `diag(2, e^{i pi/7}, e^{-i pi/7},
/// 1/2)` fixes `E J1` under congruence and is itself fixed by the order-6
/// twist.
pub fn primitive_stabilizer() -> Mat4C {
    let th = std::f64::consts::PI / 7.0;
    Mat4C::diag([
        Complex64::new(2.0, 0.0),
        Complex64::from_polar(1.0, th),
        Complex64::from_polar(1.0, -th),
        Complex64::new(0.5, 0.0),
    ])
}

/// The lift evaluated over a whole frame field.
pub fn primitive_lift(ff: &FrameField) -> Grid<Mat4C> {
    Grid::from_fn(ff.spec.nx, ff.spec.ny, |i, j| {
        primitive_lift_at(ff.frames.at(i, j))
    })
}
