//! Connection matrices and frame integration.
//!
//! At every point the coefficient data yields a pair `(U, V)` of traceless
//! 4x4 matrices — the logarithmic derivatives of the moving frame `F`:
//! `F_z = F U`, `F_zb = F V`. The frame itself is recovered by integrating
//! the equivalent real system
//!
//! ```text
//! F_x = F (U + V),        F_y = F i (U - V)
//! ```
//!
//! along grid lines with a classical fourth-order one-step scheme (RK4 with a
//! fixed number of substeps per grid cell), first along the sweep's leading
//! axis through the base node, then along the other axis from each node of
//! that line. Both sweep orders are available so path independence — the
//! numerical shadow of flatness — can be measured directly.
//!
//! The matrices have the fixed shape
//!
//! ```text
//!     | beta   P      k      b conj(P) |        | gamma  conj k  conj P  conj(b) P |
//! U = | 1     -beta   0      k         |,   V = | 0      gamma   conj b  conj P    |
//!     | 0      b      beta   P         |        | 1      0      -gamma   conj k    |
//!     | 0      0      1     -beta      |        | 0      1       0      -gamma     |
//! ```
//!
//! with `beta = conj(b)_z / (2 conj b)` and `gamma = b_zb / (2 b)`.

use num_complex::Complex64;
use wirtexpr::EvalError;

use crate::linalg::{constants, Mat4C};
use crate::surface::{DerivedData, Grid, GridSpec, SurfaceData, MIN_B_MODULUS};

/// Default number of RK4 substeps per grid cell. Chosen so that on the
/// constant-coefficient reference data the frame error at step 0.02 sits
/// comfortably under 1e-8 while the step-halving ratio is still governed by
/// truncation rather than the f64 rounding floor.
pub const DEFAULT_SUBSTEPS: usize = 12;

/// Nodes where the first homogeneous lift component falls below this modulus
/// are outside the affine chart and get no chart coordinates.
pub const CHART_FLOOR: f64 = 1e-6;

/// Errors raised while assembling or integrating connections.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("coefficient evaluation failed at z = {z}: {source}")]
    Eval {
        z: Complex64,
        #[source]
        source: EvalError,
    },
    #[error("|b| = {modulus:.3e} at z = {z} is below the floor {floor:.0e}")]
    SmallB {
        z: Complex64,
        modulus: f64,
        floor: f64,
    },
}

/// The connection pair at a point together with its symbolic derivatives in
/// the directions that enter the flatness residual `U_zb - V_z - [U, V]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingFramePair {
    pub u: Mat4C,
    pub v: Mat4C,
    /// `∂zb U`, entrywise symbolic derivative evaluated at the point.
    pub u_dzb: Mat4C,
    /// `∂z V`, entrywise symbolic derivative evaluated at the point.
    pub v_dz: Mat4C,
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Scalar inputs for one connection evaluation.
struct ConnVals {
    b: Complex64,
    k: Complex64,
    p_cap: Complex64,
    beta: Complex64,
    gamma: Complex64,
}

fn conn_vals(sd: &SurfaceData, dd: &DerivedData, z: Complex64) -> Result<ConnVals, FrameError> {
    let ev = |f: &wirtexpr::CoeffField, a: usize, bo: usize| {
        f.eval(a, bo, z).map_err(|source| FrameError::Eval { z, source })
    };
    let b = ev(&sd.b, 0, 0)?;
    let modulus = b.norm();
    if modulus < MIN_B_MODULUS {
        return Err(FrameError::SmallB {
            z,
            modulus,
            floor: MIN_B_MODULUS,
        });
    }
    let b_zb = ev(&sd.b, 0, 1)?;
    Ok(ConnVals {
        b,
        k: ev(&dd.k, 0, 0)?,
        p_cap: ev(&dd.cap_p, 0, 0)?,
        // beta = conj(b)_z / (2 conj b) = conj(b_zb) / (2 conj b).
        beta: b_zb.conj() / (2.0 * b.conj()),
        gamma: b_zb / (2.0 * b),
    })
}

fn u_matrix(v: &ConnVals) -> Mat4C {
    let z0 = cx(0.0, 0.0);
    let one = cx(1.0, 0.0);
    Mat4C::from_rows([
        [v.beta, v.p_cap, v.k, v.b * v.p_cap.conj()],
        [one, -v.beta, z0, v.k],
        [z0, v.b, v.beta, v.p_cap],
        [z0, z0, one, -v.beta],
    ])
}

fn v_matrix(v: &ConnVals) -> Mat4C {
    let z0 = cx(0.0, 0.0);
    let one = cx(1.0, 0.0);
    Mat4C::from_rows([
        [v.gamma, v.k.conj(), v.p_cap.conj(), v.b.conj() * v.p_cap],
        [z0, v.gamma, v.b.conj(), v.p_cap.conj()],
        [one, z0, -v.gamma, v.k.conj()],
        [z0, one, z0, -v.gamma],
    ])
}

/// The connection pair `(U, V)` at a point (no derivative matrices — the
/// cheap path used by the integrators).
pub fn uv_at(
    sd: &SurfaceData,
    dd: &DerivedData,
    z: Complex64,
) -> Result<(Mat4C, Mat4C), FrameError> {
    let v = conn_vals(sd, dd, z)?;
    Ok((u_matrix(&v), v_matrix(&v)))
}

/// The connection pair with its symbolic `∂zb U` and `∂z V`, all evaluated
/// at `z` on the slice.
pub fn assemble_uv(
    sd: &SurfaceData,
    dd: &DerivedData,
    z: Complex64,
) -> Result<MovingFramePair, FrameError> {
    let vals = conn_vals(sd, dd, z)?;
    let ev = |f: &wirtexpr::CoeffField, a: usize, bo: usize| {
        f.eval(a, bo, z).map_err(|source| FrameError::Eval { z, source })
    };
    let b = vals.b;
    let b_z = ev(&sd.b, 1, 0)?;
    let b_zb = ev(&sd.b, 0, 1)?;
    let b_zzb = ev(&sd.b, 1, 1)?;
    let k_zb = ev(&dd.k, 0, 1)?;
    let p_z = ev(&dd.cap_p, 1, 0)?;
    let p_zb = ev(&dd.cap_p, 0, 1)?;

    // gamma = b_zb / (2b): gamma_z by the quotient rule; beta = conj(gamma)
    // on the slice, so beta_zb = conj(gamma_z).
    let gamma_z = (b_zzb * b - b_zb * b_z) / (2.0 * b * b);
    let beta_zb = gamma_z.conj();

    let z0 = cx(0.0, 0.0);
    // Entrywise zb-derivative of U: constants drop, beta/P/k/b differentiate,
    // and conj(P)_zb = conj(P_z) on the slice.
    let bpbar_zb = b_zb * vals.p_cap.conj() + b * p_z.conj();
    let u_dzb = Mat4C::from_rows([
        [beta_zb, p_zb, k_zb, bpbar_zb],
        [z0, -beta_zb, z0, k_zb],
        [z0, b_zb, beta_zb, p_zb],
        [z0, z0, z0, -beta_zb],
    ]);
    // Entrywise z-derivative of V: conj(k)_z = conj(k_zb), conj(b)_z =
    // conj(b_zb), conj(P)_z = conj(P_zb).
    let bbp_z = b_zb.conj() * vals.p_cap + b.conj() * p_z;
    let v_dz = Mat4C::from_rows([
        [gamma_z, k_zb.conj(), p_zb.conj(), bbp_z],
        [z0, gamma_z, b_zb.conj(), p_zb.conj()],
        [z0, z0, -gamma_z, k_zb.conj()],
        [z0, z0, z0, -gamma_z],
    ]);
    Ok(MovingFramePair {
        u: u_matrix(&vals),
        v: v_matrix(&vals),
        u_dzb,
        v_dz,
    })
}

/// Deviation of a matrix from the `U`-shape above: forbidden entries, pinned
/// ones, the diagonal pattern `(beta, -beta, beta, -beta)` and the repeated
/// occurrences of `P`, `k` and `b conj(P)`. Zero (up to rounding) for every
/// matrix produced by [`assemble_uv`]; used to verify that conjugated frames
/// still carry connections of the same shape.
pub fn u_shape_defect(m: &Mat4C) -> f64 {
    let a = &m.m;
    let one = cx(1.0, 0.0);
    [
        (a[1][0] - one).norm(),
        (a[3][2] - one).norm(),
        a[1][2].norm(),
        a[2][0].norm(),
        a[3][0].norm(),
        a[3][1].norm(),
        (a[1][1] + a[0][0]).norm(),
        (a[2][2] - a[0][0]).norm(),
        (a[3][3] + a[0][0]).norm(),
        (a[2][3] - a[0][1]).norm(),
        (a[1][3] - a[0][2]).norm(),
        (a[0][3] - a[2][1] * a[0][1].conj()).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Deviation from the `V`-shape, mirroring [`u_shape_defect`].
pub fn v_shape_defect(m: &Mat4C) -> f64 {
    let a = &m.m;
    let one = cx(1.0, 0.0);
    [
        (a[2][0] - one).norm(),
        (a[3][1] - one).norm(),
        a[1][0].norm(),
        a[2][1].norm(),
        a[3][0].norm(),
        a[3][2].norm(),
        (a[1][1] - a[0][0]).norm(),
        (a[2][2] + a[0][0]).norm(),
        (a[3][3] + a[0][0]).norm(),
        (a[1][3] - a[0][2]).norm(),
        (a[2][3] - a[0][1]).norm(),
        (a[0][3] - a[1][2] * a[0][2].conj()).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Which axis is integrated first (through the base node).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    XThenY,
    YThenX,
}

/// One grid-cell integration step: start point, signed extent along exactly
/// one axis, and the node the step lands on.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellStep {
    pub from: (usize, usize),
    pub target: (usize, usize),
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
}

/// The full, deterministic cell order of a sweep: the leading axis line
/// through the base (outward in both directions), then every line of the
/// other axis starting from that line.
pub(crate) fn sweep_cells(spec: &GridSpec, base: (usize, usize), sweep: Sweep) -> Vec<CellStep> {
    let (ib, jb) = base;
    let h = spec.h;
    let mut cells = Vec::new();
    let mut push = |from: (usize, usize), target: (usize, usize)| {
        let dx = (target.0 as f64 - from.0 as f64) * h;
        let dy = (target.1 as f64 - from.1 as f64) * h;
        cells.push(CellStep {
            from,
            target,
            x0: spec.x_at(from.0),
            y0: spec.y_at(from.1),
            dx,
            dy,
        });
    };
    match sweep {
        Sweep::XThenY => {
            for i in ib..spec.nx - 1 {
                push((i, jb), (i + 1, jb));
            }
            for i in (1..=ib).rev() {
                push((i, jb), (i - 1, jb));
            }
            for i in 0..spec.nx {
                for j in jb..spec.ny - 1 {
                    push((i, j), (i, j + 1));
                }
                for j in (1..=jb).rev() {
                    push((i, j), (i, j - 1));
                }
            }
        }
        Sweep::YThenX => {
            for j in jb..spec.ny - 1 {
                push((ib, j), (ib, j + 1));
            }
            for j in (1..=jb).rev() {
                push((ib, j), (ib, j - 1));
            }
            for j in 0..spec.ny {
                for i in ib..spec.nx - 1 {
                    push((i, j), (i + 1, j));
                }
                for i in (1..=ib).rev() {
                    push((i, j), (i - 1, j));
                }
            }
        }
    }
    cells
}

/// Sample positions of one cell at `substeps` RK4 substeps: the `2 m + 1`
/// points `t = s/(2m)`, shared between neighbouring substeps.
pub(crate) fn cell_sample_points(cell: &CellStep, substeps: usize) -> Vec<(f64, f64)> {
    let m = substeps;
    (0..=2 * m)
        .map(|s| {
            let t = s as f64 / (2 * m) as f64;
            (cell.x0 + t * cell.dx, cell.y0 + t * cell.dy)
        })
        .collect()
}

/// Advance a frame across one cell: classical RK4 on `F' = F B(t)` per
/// substep, with `B` the generator increment returned by `gen` for the
/// substep's signed extent.
pub(crate) fn rk4_cell<S>(
    start: Mat4C,
    samples: &[S],
    cell: &CellStep,
    substeps: usize,
    gen: &impl Fn(&S, f64, f64) -> Mat4C,
) -> Mat4C {
    let m = substeps;
    let (dxs, dys) = (cell.dx / m as f64, cell.dy / m as f64);
    let half = cx(0.5, 0.0);
    let sixth = cx(1.0 / 6.0, 0.0);
    let two = cx(2.0, 0.0);
    let mut f = start;
    for s in 0..m {
        let b0 = gen(&samples[2 * s], dxs, dys);
        let bm = gen(&samples[2 * s + 1], dxs, dys);
        let b1 = gen(&samples[2 * s + 2], dxs, dys);
        let k1 = f * b0;
        let k2 = (f + k1.scale(half)) * bm;
        let k3 = (f + k2.scale(half)) * bm;
        let k4 = (f + k3) * b1;
        f = f + (k1 + (k2 + k3).scale(two) + k4).scale(sixth);
    }
    f
}

/// Integrate a sweep: sample every cell once with `sample`, then advance
/// frames cell by cell with [`rk4_cell`]. The base node carries the identity.
pub(crate) fn integrate_sweep<S, E>(
    spec: &GridSpec,
    base: (usize, usize),
    sweep: Sweep,
    substeps: usize,
    mut sample: impl FnMut(f64, f64) -> Result<S, E>,
    gen: impl Fn(&S, f64, f64) -> Mat4C,
) -> Result<Grid<Mat4C>, E> {
    let cells = sweep_cells(spec, base, sweep);
    let mut frames = Grid::from_fn(spec.nx, spec.ny, |_, _| Mat4C::identity());
    for cell in &cells {
        let mut samples = Vec::with_capacity(2 * substeps + 1);
        for (x, y) in cell_sample_points(cell, substeps) {
            samples.push(sample(x, y)?);
        }
        let start = *frames.at(cell.from.0, cell.from.1);
        let advanced = rk4_cell(start, &samples, cell, substeps, &gen);
        *frames.at_mut(cell.target.0, cell.target.1) = advanced;
    }
    Ok(frames)
}

/// A frame field on the grid, produced by one sweep.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub frames: Grid<Mat4C>,
    pub spec: GridSpec,
    pub base: (usize, usize),
    pub sweep: Sweep,
    pub substeps: usize,
}

impl FrameField {
    /// Largest deviation of `det F` from one over the grid.
    pub fn det_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (_, _, f) in self.frames.iter() {
            worst = worst.max((f.det() - cx(1.0, 0.0)).norm());
        }
        worst
    }

    /// Largest Frobenius deviation of `conj F` from `C F C` (C the middle
    /// swap) — the statement that conjugation acts on frames by the middle
    /// swap, which is what makes `L F L^-1` real.
    pub fn reality_defect(&self) -> f64 {
        let c = constants::c_swap();
        let mut worst: f64 = 0.0;
        for (_, _, f) in self.frames.iter() {
            worst = worst.max((f.conj() - c * *f * c).norm());
        }
        worst
    }
}

/// The generator increment for the bare (spectral-parameter-free) frame
/// system: `(U + V) dx + i (U - V) dy`.
fn bare_generator(uv: &(Mat4C, Mat4C), dx: f64, dy: f64) -> Mat4C {
    let (u, v) = uv;
    (*u + *v).scale(cx(dx, 0.0)) + (*u - *v).scale(cx(0.0, dy))
}

/// Integrate the frame field of the coefficient data with the given sweep
/// order and RK4 substep count ([`DEFAULT_SUBSTEPS`] is the tuned default).
pub fn integrate_frame(
    sd: &SurfaceData,
    dd: &DerivedData,
    sweep: Sweep,
    substeps: usize,
) -> Result<FrameField, FrameError> {
    let frames = integrate_sweep(
        &sd.grid,
        sd.base,
        sweep,
        substeps,
        |x, y| uv_at(sd, dd, cx(x, y)),
        bare_generator,
    )?;
    Ok(FrameField {
        frames,
        spec: sd.grid,
        base: sd.base,
        sweep,
        substeps,
    })
}

/// Integrate both sweep orders and report the largest Frobenius distance
/// between the two frame fields, with its grid location. Fourth-order small
/// for flat connections; order-one for inconsistent data.
pub fn path_independence_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
    substeps: usize,
) -> Result<(f64, (f64, f64)), FrameError> {
    let fxy = integrate_frame(sd, dd, Sweep::XThenY, substeps)?;
    let fyx = integrate_frame(sd, dd, Sweep::YThenX, substeps)?;
    let mut worst = f64::NEG_INFINITY;
    let mut at = (0.0, 0.0);
    for (i, j, f) in fxy.frames.iter() {
        let d = (*f - *fyx.frames.at(i, j)).norm();
        if d > worst {
            worst = d;
            at = (sd.grid.x_at(i), sd.grid.y_at(j));
        }
    }
    Ok((worst, at))
}

/// A realified frame field `L F L^-1` (entrywise real up to integration
/// error) together with the largest imaginary part seen, as a diagnostic.
#[derive(Debug, Clone)]
pub struct RealifiedFrames {
    pub frames: Grid<Mat4C>,
    pub max_imag: f64,
}

/// Conjugate every frame by the realifying basis change.
pub fn realify(ff: &FrameField) -> RealifiedFrames {
    let l = constants::l();
    let l_inv = constants::l_inv();
    let mut max_imag: f64 = 0.0;
    let frames = Grid::from_fn(ff.spec.nx, ff.spec.ny, |i, j| {
        let hat = l * *ff.frames.at(i, j) * l_inv;
        max_imag = max_imag.max(hat.max_imag());
        hat
    });
    RealifiedFrames { frames, max_imag }
}

/// One node of the projective surface lift: the real homogeneous 4-vector
/// (first column of the realified frame) and, when the leading component is
/// at least [`CHART_FLOOR`] in modulus, its affine-chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftPoint {
    pub homogeneous: [f64; 4],
    pub chart: Option<[f64; 3]>,
}

/// Extract the surface lift from realified frames.
pub fn surface_lift(rf: &RealifiedFrames) -> Grid<LiftPoint> {
    Grid::from_fn(rf.frames.nx, rf.frames.ny, |i, j| {
        let f = rf.frames.at(i, j);
        let v = [f.m[0][0].re, f.m[1][0].re, f.m[2][0].re, f.m[3][0].re];
        let chart = if v[0].abs() >= CHART_FLOOR {
            Some([v[1] / v[0], v[2] / v[0], v[3] / v[0]])
        } else {
            None
        };
        LiftPoint { homogeneous: v, chart }
    })
}

/// Consistency of the integrated frame columns with their defining relation:
/// the second column should be `f_z - conj(b)_z/(2 conj b) f` with `f` the
/// first column. `f_z` is approximated by second-order central differences on
/// interior nodes, so the supremum decays like the square of the step for a
/// correct frame field.
pub fn lift_column_residual(
    sd: &SurfaceData,
    ff: &FrameField,
) -> Result<f64, FrameError> {
    let spec = ff.spec;
    let col = |i: usize, j: usize, c: usize| -> [Complex64; 4] {
        let f = ff.frames.at(i, j);
        [f.m[0][c], f.m[1][c], f.m[2][c], f.m[3][c]]
    };
    let mut worst: f64 = 0.0;
    for j in 1..spec.ny - 1 {
        for i in 1..spec.nx - 1 {
            let z = spec.z_at(i, j);
            let b = sd.b.eval(0, 0, z).map_err(|source| FrameError::Eval { z, source })?;
            let b_zb = sd.b.eval(0, 1, z).map_err(|source| FrameError::Eval { z, source })?;
            let beta = b_zb.conj() / (2.0 * b.conj());
            let (fx0, fx1) = (col(i - 1, j, 0), col(i + 1, j, 0));
            let (fy0, fy1) = (col(i, j - 1, 0), col(i, j + 1, 0));
            let f = col(i, j, 0);
            let f1 = col(i, j, 1);
            let mut dev: f64 = 0.0;
            for r in 0..4 {
                let dx = (fx1[r] - fx0[r]) / (2.0 * spec.h);
                let dy = (fy1[r] - fy0[r]) / (2.0 * spec.h);
                let fz = 0.5 * (dx - cx(0.0, 1.0) * dy);
                dev += (fz - beta * f[r] - f1[r]).norm_sqr();
            }
            worst = worst.max(dev.sqrt());
        }
    }
    Ok(worst)
}
