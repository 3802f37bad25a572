//! Surface data on a grid: the coefficient pair `(b, p)`, the derived
//! invariants `k` and `P`, residual reports, classification and a small
//! catalog of built-in data sets.
//!
//! A surface is described in a conformal-type coordinate `z = x + iy` by two
//! closed-form coefficient fields on a rectangle: `b` (nowhere zero; its
//! modulus squared carries the invariant metric `8 |b|^2 dz dzb`) and `p`.
//! The derived fields are
//!
//! ```text
//! k = (|b|^2 - (log b)_zzb) / 2
//! P = p + b_zb/2 - bb_zz/(2 bb) + bb_z^2/(4 bb^2)      (bb = conj b)
//! ```
//!
//! and everything downstream — compatibility residuals, classification, the
//! connection matrices — is written in terms of `b`, `k`, `P`. All residuals
//! here are evaluated symbolically at grid nodes; no finite differences are
//! involved anywhere in this module.

use num_complex::Complex64;
use wirtexpr::{CoeffField, Dir, EvalError, Expr};

/// Default grid step for the catalog entries.
pub const DEFAULT_STEP: f64 = 0.05;
/// Default residual tolerance for classification.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Smallest coefficient modulus the pipeline accepts: below this, divisions
/// by `b` and `conj b` in the derived fields lose too many digits to trust.
pub const MIN_B_MODULUS: f64 = 1e-6;
/// How precisely grid geometry must close up (spans an integer number of
/// steps, base point on a node). Pure bookkeeping slack, far below any
/// residual tolerance.
const GRID_SNAP: f64 = 1e-9;

/// Errors raised while building or classifying surface data.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("grid step must be positive and finite, got {h}")]
    InvalidStep { h: f64 },
    #[error("domain [{x0}, {x1}] x [{y0}, {y1}] is degenerate or not an integer number of steps")]
    InvalidDomain { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("base point ({x}, {y}) is not a grid node inside the domain")]
    InvalidBase { x: f64, y: f64 },
    #[error("coefficient `{field}` cannot be evaluated on the grid: {source}")]
    Pole {
        field: &'static str,
        #[source]
        source: EvalError,
    },
    #[error("|b| = {modulus:.3e} at z = {z} is below the floor {floor:.0e}")]
    SmallCoefficient { z: Complex64, modulus: f64, floor: f64 },
    #[error("compatibility residuals (comp1 = {comp1:.3e}, comp2 = {comp2:.3e}) exceed {tol:.3e}: the data does not describe a surface")]
    NotASurface { comp1: f64, comp2: f64, tol: f64 },
    #[error("unknown catalog entry `{name}`")]
    UnknownCatalog { name: String },
    #[error("catalog parameter {name} = {value} is out of range: {reason}")]
    BadParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// A closed rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Grid geometry: the rectangle, the common step in both directions, and the
/// node counts. Node `(i, j)` sits at `(x0 + i h, y0 + j h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rect: Rect,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(rect: Rect, h: f64) -> Result<Self, SurfaceError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(SurfaceError::InvalidStep { h });
        }
        let spans = [rect.x1 - rect.x0, rect.y1 - rect.y0];
        let mut cells = [0usize; 2];
        for (idx, span) in spans.iter().enumerate() {
            let n = (span / h).round();
            if !(n >= 1.0 && (n * h - span).abs() <= GRID_SNAP * span.abs().max(1.0)) {
                return Err(SurfaceError::InvalidDomain {
                    x0: rect.x0,
                    x1: rect.x1,
                    y0: rect.y0,
                    y1: rect.y1,
                });
            }
            cells[idx] = n as usize;
        }
        Ok(GridSpec {
            rect,
            h,
            nx: cells[0] + 1,
            ny: cells[1] + 1,
        })
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.rect.x0 + i as f64 * self.h
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.rect.y0 + j as f64 * self.h
    }

    pub fn z_at(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x_at(i), self.y_at(j))
    }

    /// Locate a coordinate pair on the grid, within snapping tolerance.
    fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = (x - self.rect.x0) / self.h;
        let fj = (y - self.rect.y0) / self.h;
        let (i, j) = (fi.round(), fj.round());
        let on = |f: f64, r: f64, n: usize| r >= 0.0 && (r as usize) < n && (f - r).abs() * self.h <= GRID_SNAP;
        if on(fi, i, self.nx) && on(fj, j, self.ny) {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }
}

/// A rectangular grid of values, row-major in `y` (index `j * nx + i` for
/// node `(i, j)`).
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub nx: usize,
    pub ny: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Grid { nx, ny, data }
    }

    pub fn try_from_fn<E>(
        nx: usize,
        ny: usize,
        mut f: impl FnMut(usize, usize) -> Result<T, E>,
    ) -> Result<Self, E> {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j)?);
            }
        }
        Ok(Grid { nx, ny, data })
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[j * self.nx + i]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[j * self.nx + i]
    }

    /// Iterate `(i, j, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let nx = self.nx;
        self.data
            .iter()
            .enumerate()
            .map(move |(idx, v)| (idx % nx, idx / nx, v))
    }
}

impl Grid<f64> {
    /// Supremum and its first grid location in storage order.
    pub fn sup_argmax(&self, spec: &GridSpec) -> (f64, (f64, f64)) {
        let mut best = f64::NEG_INFINITY;
        let mut at = (0usize, 0usize);
        for (i, j, &v) in self.iter() {
            if v > best {
                best = v;
                at = (i, j);
            }
        }
        (best, (spec.x_at(at.0), spec.y_at(at.1)))
    }
}

/// One named residual: its supremum over the grid and where it is attained
/// (first node in storage order on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub name: &'static str,
    pub sup: f64,
    pub argmax: (f64, f64),
}

/// A set of named residuals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn sup(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.sup)
    }

    pub fn push_grid(&mut self, name: &'static str, grid: &Grid<f64>, spec: &GridSpec) {
        let (sup, argmax) = grid.sup_argmax(spec);
        self.entries.push(ResidualEntry { name, sup, argmax });
    }
}

/// Coefficient data on a grid, validated at construction: positive step,
/// well-formed rectangle, base point on a node, both coefficients (and all
/// cached derivatives) evaluable everywhere, and `|b|` above
/// [`MIN_B_MODULUS`].
#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub grid: GridSpec,
    pub b: CoeffField,
    pub p: CoeffField,
    /// Base node indices; frame integration starts here with the identity.
    pub base: (usize, usize),
    /// Smallest `|b|` over the grid nodes, recorded during validation.
    pub min_abs_b: f64,
}

impl SurfaceData {
    pub fn new(
        rect: Rect,
        h: f64,
        base: (f64, f64),
        b: Expr,
        p: Expr,
    ) -> Result<Self, SurfaceError> {
        let grid = GridSpec::new(rect, h)?;
        let (ib, jb) = grid
            .locate(base.0, base.1)
            .ok_or(SurfaceError::InvalidBase {
                x: base.0,
                y: base.1,
            })?;
        let b = CoeffField::new(b);
        let p = CoeffField::new(p);
        let mut min_abs_b = f64::INFINITY;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let z = grid.z_at(i, j);
                for da in 0..=3usize {
                    for db in 0..=(3 - da) {
                        b.eval(da, db, z)
                            .map_err(|source| SurfaceError::Pole { field: "b", source })?;
                        p.eval(da, db, z)
                            .map_err(|source| SurfaceError::Pole { field: "p", source })?;
                    }
                }
                let bv = b.eval(0, 0, z).expect("checked above");
                let modulus = bv.norm();
                if modulus < MIN_B_MODULUS {
                    return Err(SurfaceError::SmallCoefficient {
                        z,
                        modulus,
                        floor: MIN_B_MODULUS,
                    });
                }
                min_abs_b = min_abs_b.min(modulus);
            }
        }
        Ok(SurfaceData {
            grid,
            b,
            p,
            base: (ib, jb),
            min_abs_b,
        })
    }

    /// The same coefficient data on a refined or coarsened grid, revalidated.
    pub fn with_step(&self, h: f64) -> Result<Self, SurfaceError> {
        SurfaceData::new(
            self.grid.rect,
            h,
            (self.grid.x_at(self.base.0), self.grid.y_at(self.base.1)),
            self.b.expr().clone(),
            self.p.expr().clone(),
        )
    }

    pub fn base_z(&self) -> Complex64 {
        self.grid.z_at(self.base.0, self.base.1)
    }
}

/// The derived invariants `k` and `P` with cached derivatives.
#[derive(Debug, Clone)]
pub struct DerivedData {
    pub k: CoeffField,
    /// The invariant `P` (upper case in the usual notation; `p` is the raw
    /// coefficient it is derived from).
    pub cap_p: CoeffField,
}

/// Build `k` and `P` from the coefficient pair.
///
/// Both are constructed symbolically from `b`'s cached derivatives; the
/// conjugated quantities use `conj` nodes, which on the slice `zb = conj z`
/// evaluate to the complex conjugates of the corresponding values.
pub fn derive_kp(sd: &SurfaceData) -> DerivedData {
    let b = sd.b.expr();
    let half = Expr::real(0.5);
    let two = Expr::real(2.0);
    let four = Expr::real(4.0);

    // k = (|b|^2 - (log b)_zzb) / 2, with |b|^2 written as b * conj b.
    let log_b_zzb = b.log().wirtinger(Dir::Dz).wirtinger(Dir::Dzb);
    let k = half.mul(&b.mul(&b.conj()).sub(&log_b_zzb));

    // P = p + b_zb/2 - bb_zz/(2 bb) + bb_z^2/(4 bb^2), where bb = conj b and
    // barred derivatives come from the direction swap under conjugation:
    // bb_z = conj(b_zb), bb_zz = conj(b_zbzb).
    let bb = b.conj();
    let bb_z = sd.b.deriv(0, 1).conj();
    let bb_zz = sd.b.deriv(0, 2).conj();
    let cap_p = sd
        .p
        .expr()
        .add(&half.mul(sd.b.deriv(0, 1)))
        .sub(&bb_zz.div(&two.mul(&bb)))
        .add(&bb_z.pow(2).div(&four.mul(&bb.pow(2))));

    DerivedData {
        k: CoeffField::new(k),
        cap_p: CoeffField::new(cap_p),
    }
}

/// Pointwise values used by every residual below, evaluated once per node.
struct NodeVals {
    b: Complex64,
    b_zb: Complex64,
    k: Complex64,
    k_zb: Complex64,
    p_cap: Complex64,
    p_z: Complex64,
    p_zb: Complex64,
}

fn node_vals(sd: &SurfaceData, dd: &DerivedData, z: Complex64) -> Result<NodeVals, SurfaceError> {
    let ev = |f: &CoeffField, a: usize, bo: usize| {
        f.eval(a, bo, z)
            .map_err(|source| SurfaceError::Pole { field: "derived", source })
    };
    Ok(NodeVals {
        b: ev(&sd.b, 0, 0)?,
        b_zb: ev(&sd.b, 0, 1)?,
        k: ev(&dd.k, 0, 0)?,
        k_zb: ev(&dd.k, 0, 1)?,
        p_cap: ev(&dd.cap_p, 0, 0)?,
        p_z: ev(&dd.cap_p, 1, 0)?,
        p_zb: ev(&dd.cap_p, 0, 1)?,
    })
}

/// The two compatibility residuals that decide whether `(b, p)` describes a
/// surface at all:
///
/// ```text
/// comp1 = |conj(P)_z - k_zb - k b_zb / b|
/// comp2 = |Im(conj(b) P_z + 2 conj(b)_z P)|
/// ```
pub fn gauss_codazzi_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
) -> Result<ResidualReport, SurfaceError> {
    let spec = sd.grid;
    let mut comp1 = Grid::from_fn(spec.nx, spec.ny, |_, _| 0.0);
    let mut comp2 = comp1.clone();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let v = node_vals(sd, dd, spec.z_at(i, j))?;
            // conj(P)_z on the slice is conj(P_zb); conj(b)_z is conj(b_zb).
            let c1 = v.p_zb.conj() - v.k_zb - v.k * v.b_zb / v.b;
            let c2 = (v.b.conj() * v.p_z + 2.0 * v.b_zb.conj() * v.p_cap).im;
            *comp1.at_mut(i, j) = c1.norm();
            *comp2.at_mut(i, j) = c2.abs();
        }
    }
    let mut report = ResidualReport::default();
    report.push_grid("comp1", &comp1, &spec);
    report.push_grid("comp2", &comp2, &spec);
    Ok(report)
}

/// Pointwise modulus of the minimality defect `conj(b) P_z + 2 conj(b)_z P`.
/// Identically zero exactly for projectively minimal data.
pub fn minimality_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
) -> Result<Grid<f64>, SurfaceError> {
    let spec = sd.grid;
    Grid::try_from_fn(spec.nx, spec.ny, |i, j| {
        let v = node_vals(sd, dd, spec.z_at(i, j))?;
        Ok((v.b.conj() * v.p_z + 2.0 * v.b_zb.conj() * v.p_cap).norm())
    })
}

/// The two integrability residuals of the coefficient pair itself (no
/// derived fields involved):
///
/// ```text
/// canon1 = |p_zb - b conj(b)_z - b_z conj(b)/2 + b_zbzb/2|
/// canon2 = |Im(b_zbzbzb - b conj(b)_zzb - 2 b conj(p)_zb - 2 b_zb conj(b)_z - 4 b_zb conj(p))|
/// ```
pub fn canonical_integrability_residual(sd: &SurfaceData) -> Result<ResidualReport, SurfaceError> {
    let spec = sd.grid;
    let mut canon1 = Grid::from_fn(spec.nx, spec.ny, |_, _| 0.0);
    let mut canon2 = canon1.clone();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = spec.z_at(i, j);
            let ev = |f: &CoeffField, a: usize, bo: usize| {
                f.eval(a, bo, z)
                    .map_err(|source| SurfaceError::Pole { field: "coefficient", source })
            };
            let b = ev(&sd.b, 0, 0)?;
            let b_z = ev(&sd.b, 1, 0)?;
            let b_zb = ev(&sd.b, 0, 1)?;
            let b_zbzb = ev(&sd.b, 0, 2)?;
            let b_zzb = ev(&sd.b, 1, 1)?;
            let b_zb3 = ev(&sd.b, 0, 3)?;
            let p = ev(&sd.p, 0, 0)?;
            let p_z = ev(&sd.p, 1, 0)?;
            let p_zb = ev(&sd.p, 0, 1)?;
            let c1 = p_zb - b * b_zb.conj() - 0.5 * b_z * b.conj() + 0.5 * b_zbzb;
            let c2 = (b_zb3 - b * b_zzb.conj() - 2.0 * b * p_z.conj()
                - 2.0 * b_zb * b_zb.conj()
                - 4.0 * b_zb * p.conj())
            .im;
            *canon1.at_mut(i, j) = c1.norm();
            *canon2.at_mut(i, j) = c2.abs();
        }
    }
    let mut report = ResidualReport::default();
    report.push_grid("canon1", &canon1, &spec);
    report.push_grid("canon2", &canon2, &spec);
    Ok(report)
}

/// All six named residuals in one report, in the fixed order
/// `comp1, comp2, projmin, demoulin, canon1, canon2`.
pub fn residual_report(sd: &SurfaceData, dd: &DerivedData) -> Result<ResidualReport, SurfaceError> {
    let spec = sd.grid;
    let mut report = gauss_codazzi_residual(sd, dd)?;
    let projmin = minimality_residual(sd, dd)?;
    report.push_grid("projmin", &projmin, &spec);
    let demoulin = Grid::try_from_fn(spec.nx, spec.ny, |i, j| {
        dd.cap_p
            .eval(0, 0, spec.z_at(i, j))
            .map(|v| v.norm())
            .map_err(|source| SurfaceError::Pole { field: "derived", source })
    })?;
    report.push_grid("demoulin", &demoulin, &spec);
    let canon = canonical_integrability_residual(sd)?;
    report.entries.extend(canon.entries);
    Ok(report)
}

/// Surface classes ordered from most to least special.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    /// `P` vanishes identically.
    Demoulin,
    /// The minimality defect vanishes but `P` does not.
    ProjectiveMinimal,
    /// Neither vanishes.
    Generic,
}

impl std::fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceClass::Demoulin => write!(f, "Demoulin"),
            SurfaceClass::ProjectiveMinimal => write!(f, "ProjectiveMinimal"),
            SurfaceClass::Generic => write!(f, "Generic"),
        }
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: SurfaceClass,
    /// Whether `b`, `k`, `P` are all constant over the grid (within the
    /// tolerance, componentwise) with `P` bounded away from zero.
    pub coincidence: bool,
    /// The first-order zero-curvature residual triple
    /// `(sup |P_zb|, sup |k_zb + k b_zb / b|, sup |minimality defect|)`.
    pub zcr_first_order: [ResidualEntry; 3],
    /// The compatibility residuals the classification was gated on.
    pub gauss_codazzi: ResidualReport,
}

/// Classify validated surface data.
///
/// Preconditions: the compatibility residuals must not exceed `tol`,
/// otherwise the data describes no surface and classification refuses with
/// [`SurfaceError::NotASurface`]. Then: Demoulin if `sup |P| <= tol`, else
/// projectively minimal if the minimality defect stays within `tol`, else
/// generic. The coincidence flag is reported independently of the class.
pub fn classify(sd: &SurfaceData, tol: f64) -> Result<Classification, SurfaceError> {
    let dd = derive_kp(sd);
    let gauss_codazzi = gauss_codazzi_residual(sd, &dd)?;
    let comp1 = gauss_codazzi.sup("comp1").unwrap_or(f64::INFINITY);
    let comp2 = gauss_codazzi.sup("comp2").unwrap_or(f64::INFINITY);
    if comp1 > tol || comp2 > tol {
        return Err(SurfaceError::NotASurface { comp1, comp2, tol });
    }

    let zcr = crate::spectral::zcr_first_order_residual(sd, &dd)?;

    let spec = sd.grid;
    let sup_p = Grid::try_from_fn(spec.nx, spec.ny, |i, j| {
        dd.cap_p
            .eval(0, 0, spec.z_at(i, j))
            .map(|v| v.norm())
            .map_err(|source| SurfaceError::Pole { field: "derived", source })
    })?
    .sup_argmax(&spec)
    .0;

    let class = if sup_p <= tol {
        SurfaceClass::Demoulin
    } else if zcr[2].sup <= tol {
        SurfaceClass::ProjectiveMinimal
    } else {
        SurfaceClass::Generic
    };

    // Coincidence: b, k, P all constant over the grid and P away from zero.
    let mut spread: f64 = 0.0;
    for field in [&sd.b, &dd.k, &dd.cap_p] {
        let mut re = (f64::INFINITY, f64::NEG_INFINITY);
        let mut im = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let v = field
                    .eval(0, 0, spec.z_at(i, j))
                    .map_err(|source| SurfaceError::Pole { field: "derived", source })?;
                re = (re.0.min(v.re), re.1.max(v.re));
                im = (im.0.min(v.im), im.1.max(v.im));
            }
        }
        spread = spread.max(re.1 - re.0).max(im.1 - im.0);
    }
    let coincidence = spread <= tol && sup_p > tol;

    Ok(Classification {
        class,
        coincidence,
        zcr_first_order: zcr,
        gauss_codazzi,
    })
}

/// Parameterized builders behind [`catalog`]. Each returns fully validated
/// surface data; tests and the command line drive them with non-default
/// parameters and steps.
pub mod entries {
    use super::*;

    /// Constant coefficients `b = b0 > 0`, `p = 0` on `[0, 1]^2`: the
    /// simplest data with `P = 0` (so Demoulin) and `k = b0^2 / 2`.
    pub fn const_demoulin(b0: f64, h: f64) -> Result<SurfaceData, SurfaceError> {
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(SurfaceError::BadParameter {
                name: "b0",
                value: b0,
                reason: "must be a positive real",
            });
        }
        SurfaceData::new(
            Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 },
            h,
            (0.0, 0.0),
            Expr::real(b0),
            Expr::zero(),
        )
    }

    /// `b = 1 / (1 - z zb)` on `[-0.55, 0.55]^2` with `p` chosen so that the
    /// derived `P` cancels identically (a Demoulin data set with genuinely
    /// varying coefficients; on the slice `b = 1/(1 - |z|^2)` stays in
    /// `[1, ~2.6]` there). The cancellation is structural: `p` is built from
    /// the same derivative expressions that enter `P`.
    pub fn liouville_demoulin(h: f64) -> Result<SurfaceData, SurfaceError> {
        let b = Expr::one().div(&Expr::one().sub(&Expr::z().mul(&Expr::zb())));
        let two = Expr::real(2.0);
        let four = Expr::real(4.0);
        let b_zb = b.wirtinger(Dir::Dzb);
        let bb = b.conj();
        let bb_z = b_zb.conj();
        let bb_zz = b_zb.wirtinger(Dir::Dzb).conj();
        // p = -(b_zb/2 - bb_zz/(2 bb) + bb_z^2/(4 bb^2)), the exact negative
        // of the correction terms in P.
        let p = b_zb
            .div(&two)
            .sub(&bb_zz.div(&two.mul(&bb)))
            .add(&bb_z.pow(2).div(&four.mul(&bb.pow(2))))
            .neg();
        SurfaceData::new(
            Rect { x0: -0.55, x1: 0.55, y0: -0.55, y1: 0.55 },
            h,
            (0.0, 0.0),
            b,
            p,
        )
    }

    /// Constant `b = b0 > 0` and constant real `p = p0 != 0` on `[0, 1]^2`:
    /// projectively minimal with `P = p0` bounded away from zero, and all of
    /// `b`, `k`, `P` constant — the coincidence situation.
    pub fn coincidence_minimal(b0: f64, p0: f64, h: f64) -> Result<SurfaceData, SurfaceError> {
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(SurfaceError::BadParameter {
                name: "b0",
                value: b0,
                reason: "must be a positive real",
            });
        }
        if !(p0.is_finite() && p0 != 0.0) {
            return Err(SurfaceError::BadParameter {
                name: "p0",
                value: p0,
                reason: "must be a nonzero real",
            });
        }
        SurfaceData::new(
            Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 },
            h,
            (0.0, 0.0),
            Expr::real(b0),
            Expr::real(p0),
        )
    }

    /// `b = 1`, `p = c z + d` on `[0, 1]^2`: still a valid surface (the
    /// integrability residuals vanish), but the minimality defect is exactly
    /// `|c|` everywhere — the generic, non-minimal reference data.
    pub fn nonminimal_linear(c: f64, d: f64, h: f64) -> Result<SurfaceData, SurfaceError> {
        if !(c.is_finite() && c != 0.0) {
            return Err(SurfaceError::BadParameter {
                name: "c",
                value: c,
                reason: "must be nonzero (otherwise the data is minimal)",
            });
        }
        let p = Expr::real(c).mul(&Expr::z()).add(&Expr::real(d));
        SurfaceData::new(
            Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 },
            h,
            (0.0, 0.0),
            Expr::one(),
            p,
        )
    }
}

/// The built-in data sets by name, with default parameters and the default
/// step: `const_demoulin` (b0 = 1), `liouville_demoulin`,
/// `coincidence_minimal` (b0 = 1, p0 = 1), `nonminimal_linear` (c = d = 1).
pub fn catalog(name: &str) -> Result<SurfaceData, SurfaceError> {
    match name {
        "const_demoulin" => entries::const_demoulin(1.0, DEFAULT_STEP),
        "liouville_demoulin" => entries::liouville_demoulin(DEFAULT_STEP),
        "coincidence_minimal" => entries::coincidence_minimal(1.0, 1.0, DEFAULT_STEP),
        "nonminimal_linear" => entries::nonminimal_linear(1.0, 1.0, DEFAULT_STEP),
        _ => Err(SurfaceError::UnknownCatalog { name: name.to_string() }),
    }
}

/// Names accepted by [`catalog`], in presentation order.
pub const CATALOG_NAMES: [&str; 4] = [
    "const_demoulin",
    "liouville_demoulin",
    "coincidence_minimal",
    "nonminimal_linear",
];
