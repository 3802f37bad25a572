//! The spectral parameter: loop connections, twisted symmetries, graded
//! eigenprojections and the deformation family.
//!
//! Two involutive splittings insert the parameter `lambda` into a connection
//! pair, both placing `1/lambda` on the anti-fixed part of `U` and `lambda`
//! on that of `V`:
//!
//! * **FirstOrder** (`tau1(X) = -J1 X^T J1`): the anti-fixed part of the
//!   connection shape is its entire off-diagonal, so `U^l = diag(U) +
//!   (1/l) offdiag(U)` and `V^l = diag(V) + l offdiag(V)`. Flat for every
//!   unit `lambda` exactly when the first-order residual triple vanishes.
//! * **Conformal** (`tau2(X) = -J2 X^T J2`): only the `b conj(P)` and `b`
//!   entries of `U` (positions (0,3) and (2,1)) and the `conj(b) P` and
//!   `conj(b)` entries of `V` (positions (0,3) and (1,2)) pick up the
//!   parameter. Flat for every unit `lambda` exactly for projectively
//!   minimal data.
//!
//! The order-3 twist `sigma(X) = E X E^-1` combines with `tau1` into the
//! order-6 automorphism `kappa = tau1 . sigma`, whose eigenspaces grade the
//! algebra over Z_6; frames of the FirstOrder family are checked against the
//! corresponding symmetries in `lambda`, and the diagonal conjugation
//! `D(lambda) . D(lambda)^-1` turns a loop frame back into a frame of
//! deformed coefficient data `b -> lambda^-3 b`, `P -> lambda^-2 P`,
//! `k -> k`.

use num_complex::Complex64;

use crate::frame::{
    assemble_uv, cell_sample_points, rk4_cell, sweep_cells, u_shape_defect, uv_at,
    v_shape_defect, FrameError, FrameField, MovingFramePair, Sweep,
};
use crate::linalg::{commutator, constants, LinalgError, Mat4C};
use crate::surface::{DerivedData, Grid, ResidualEntry, SurfaceData, SurfaceError};

/// How close `|lambda|` must be to 1; the splittings are unitary only on the
/// circle, so anything further out is a caller error, not a tolerance issue.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;
/// Flatness gate for integrating a loop connection: beyond this residual the
/// frame would not be path independent and integration refuses.
pub const FLATNESS_GATE: f64 = 1e-6;
/// How exactly a deformed connection must reproduce the connection shape.
pub const DEFORMATION_SHAPE_TOL: f64 = 1e-9;

/// Errors specific to the spectral layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("lambda = {lambda} is off the unit circle (|lambda| - 1 = {defect:.3e})")]
    OffCircle { lambda: Complex64, defect: f64 },
    #[error("connection at lambda = {lambda} is not flat (residual {residual:.3e} exceeds gate {gate:.0e})")]
    NonFlat {
        lambda: Complex64,
        residual: f64,
        gate: f64,
    },
    #[error("deformed connection leaks outside the connection shape (defect {defect:.3e} exceeds {tol:.0e})")]
    ShapeLeak { defect: f64, tol: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Which involution inserts the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitType {
    FirstOrder,
    Conformal,
}

impl std::fmt::Display for SplitType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitType::FirstOrder => write!(f, "first-order"),
            SplitType::Conformal => write!(f, "conformal"),
        }
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Algebra and group automorphisms.
// ---------------------------------------------------------------------------

/// `tau1(X) = -J1 X^T J1` on the algebra.
pub fn tau1(x: &Mat4C) -> Mat4C {
    let j1 = constants::j1();
    -(j1 * x.transpose() * j1)
}

/// `tau2(X) = -J2 X^T J2` on the algebra.
pub fn tau2(x: &Mat4C) -> Mat4C {
    let j2 = constants::j2();
    -(j2 * x.transpose() * j2)
}

/// `sigma(X) = E X E^-1` on the algebra (order 3).
pub fn sigma(x: &Mat4C) -> Mat4C {
    let e = constants::e_twist();
    let e_inv = Mat4C::diag([
        cx(1.0, 0.0),
        constants::epsilon(),
        constants::epsilon() * constants::epsilon(),
        cx(1.0, 0.0),
    ]);
    e * *x * e_inv
}

/// `kappa = tau1 . sigma` on the algebra (order 6).
pub fn kappa(x: &Mat4C) -> Mat4C {
    tau1(&sigma(x))
}

/// `tau1(g) = J1 (g^T)^-1 J1` on the group. Errors on singular input.
pub fn tau1_group(g: &Mat4C) -> Result<Mat4C, SpectralError> {
    let j1 = constants::j1();
    Ok(j1 * g.transpose().inverse()? * j1)
}

/// `tau2(g) = J2 (g^T)^-1 J2` on the group. Errors on singular input.
pub fn tau2_group(g: &Mat4C) -> Result<Mat4C, SpectralError> {
    let j2 = constants::j2();
    Ok(j2 * g.transpose().inverse()? * j2)
}

/// `sigma(g) = E g E^-1` on the group.
pub fn sigma_group(g: &Mat4C) -> Mat4C {
    sigma(g)
}

/// `kappa(g) = tau1(sigma(g)) = J1 E^-1 g^-T E J1` on the group. Errors on
/// singular input.
pub fn kappa_group(g: &Mat4C) -> Result<Mat4C, SpectralError> {
    tau1_group(&sigma_group(g))
}

/// Split `x` into its fixed and anti-fixed parts under the involution:
/// `(k, p)` with `k = (x + tau x)/2`, `p = (x - tau x)/2`.
pub fn split(x: &Mat4C, which: SplitType) -> (Mat4C, Mat4C) {
    let tx = match which {
        SplitType::FirstOrder => tau1(x),
        SplitType::Conformal => tau2(x),
    };
    let half = cx(0.5, 0.0);
    ((*x + tx).scale(half), (*x - tx).scale(half))
}

fn check_unit(lambda: Complex64) -> Result<(), SpectralError> {
    let defect = (lambda.norm() - 1.0).abs();
    if defect > UNIT_CIRCLE_TOL {
        return Err(SpectralError::OffCircle { lambda, defect });
    }
    Ok(())
}

/// The loop connection pair at unit `lambda`, written in display form: the
/// parameter multiplies exactly the anti-fixed entries of the shape (the
/// whole off-diagonal for FirstOrder; the two coefficient entries for
/// Conformal), `1/lambda` in `U` and `lambda` in `V`. Agrees with
/// reassembling from [`split`] to rounding.
pub fn loop_uv(
    u: &Mat4C,
    v: &Mat4C,
    lambda: Complex64,
    which: SplitType,
) -> Result<(Mat4C, Mat4C), SpectralError> {
    check_unit(lambda)?;
    let li = lambda.finv();
    let mut ul = *u;
    let mut vl = *v;
    match which {
        SplitType::FirstOrder => {
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        ul.m[i][j] *= li;
                        vl.m[i][j] *= lambda;
                    }
                }
            }
        }
        SplitType::Conformal => {
            ul.m[0][3] *= li;
            ul.m[2][1] *= li;
            vl.m[0][3] *= lambda;
            vl.m[1][2] *= lambda;
        }
    }
    Ok((ul, vl))
}

/// The same loop connection assembled from the involution split,
/// `U^l = U_k + (1/l) U_p`, `V^l = V_k + l V_p` — the definition [`loop_uv`]
/// is checked against.
pub fn loop_uv_from_split(
    u: &Mat4C,
    v: &Mat4C,
    lambda: Complex64,
    which: SplitType,
) -> Result<(Mat4C, Mat4C), SpectralError> {
    check_unit(lambda)?;
    let (uk, up) = split(u, which);
    let (vk, vp) = split(v, which);
    Ok((uk + up.scale(lambda.finv()), vk + vp.scale(lambda)))
}

// ---------------------------------------------------------------------------
// Flatness over the sample circle.
// ---------------------------------------------------------------------------

/// Flatness of one loop connection at one node:
/// `R = (U^l)_zb - (V^l)_z - [U^l, V^l]`. The entrywise derivatives commute
/// with the constant parameter masks, so they are obtained by masking the
/// symbolic derivative matrices.
fn loop_flatness_at(
    pair: &MovingFramePair,
    lambda: Complex64,
    which: SplitType,
) -> Result<f64, SpectralError> {
    let (ul, vl) = loop_uv(&pair.u, &pair.v, lambda, which)?;
    let (ul_dzb, vl_dz) = loop_uv(&pair.u_dzb, &pair.v_dz, lambda, which)?;
    Ok((ul_dzb - vl_dz - commutator(&ul, &vl)).norm())
}

/// Flatness residual of one `lambda` sample: the sup of the pointwise
/// Frobenius norm and where it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFlatness {
    pub lambda: Complex64,
    pub sup: f64,
    pub argmax: (f64, f64),
}

/// Sample set on the circle: the `roots`-th roots of unity plus three fixed
/// pseudo-random unit numbers (a SplitMix64 stream with a pinned seed, so
/// the set is identical on every run).
pub fn lambda_samples(roots: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(roots + 3);
    for k in 0..roots {
        let th = 2.0 * std::f64::consts::PI * k as f64 / roots as f64;
        out.push(Complex64::from_polar(1.0, th));
    }
    let mut state: u64 = 0x9d05eedc0ffee;
    for _ in 0..3 {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        let unit = (z >> 11) as f64 / (1u64 << 53) as f64;
        out.push(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * unit));
    }
    out
}

/// The default sample set: [`lambda_samples`] with twelve roots (15 samples
/// in total).
pub fn default_lambda_samples() -> Vec<Complex64> {
    lambda_samples(12)
}

/// Sup-norm flatness residual per `lambda` sample. The connection and its
/// symbolic derivatives are assembled once per node and reused across the
/// whole sample set.
pub fn flatness_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
    which: SplitType,
    lambdas: &[Complex64],
) -> Result<Vec<LambdaFlatness>, SpectralError> {
    for &l in lambdas {
        check_unit(l)?;
    }
    let spec = sd.grid;
    let pairs = Grid::try_from_fn(spec.nx, spec.ny, |i, j| {
        assemble_uv(sd, dd, spec.z_at(i, j)).map_err(SpectralError::from)
    })?;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut sup = f64::NEG_INFINITY;
        let mut argmax = (0.0, 0.0);
        for (i, j, pair) in pairs.iter() {
            let r = loop_flatness_at(pair, lambda, which)?;
            if r > sup {
                sup = r;
                argmax = (spec.x_at(i), spec.y_at(j));
            }
        }
        out.push(LambdaFlatness { lambda, sup, argmax });
    }
    Ok(out)
}

/// The residual triple controlling flatness of the FirstOrder family for
/// every `lambda` at once:
/// `sup |P_zb|`, `sup |k_zb + k b_zb / b|`, `sup |conj(b) P_z + 2 conj(b)_z P|`.
pub fn zcr_first_order_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
) -> Result<[ResidualEntry; 3], SurfaceError> {
    let spec = sd.grid;
    let mut grids = [
        Grid::from_fn(spec.nx, spec.ny, |_, _| 0.0),
        Grid::from_fn(spec.nx, spec.ny, |_, _| 0.0),
        Grid::from_fn(spec.nx, spec.ny, |_, _| 0.0),
    ];
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let z = spec.z_at(i, j);
            let ev = |f: &wirtexpr::CoeffField, a: usize, bo: usize| {
                f.eval(a, bo, z)
                    .map_err(|source| SurfaceError::Pole { field: "derived", source })
            };
            let b = ev(&sd.b, 0, 0)?;
            let b_zb = ev(&sd.b, 0, 1)?;
            let k = ev(&dd.k, 0, 0)?;
            let k_zb = ev(&dd.k, 0, 1)?;
            let p_cap = ev(&dd.cap_p, 0, 0)?;
            let p_z = ev(&dd.cap_p, 1, 0)?;
            let p_zb = ev(&dd.cap_p, 0, 1)?;
            *grids[0].at_mut(i, j) = p_zb.norm();
            *grids[1].at_mut(i, j) = (k_zb + k * b_zb / b).norm();
            *grids[2].at_mut(i, j) = (b.conj() * p_z + 2.0 * b_zb.conj() * p_cap).norm();
        }
    }
    let names = ["dzb_P", "dzb_k", "minimality"];
    let mut entries = Vec::with_capacity(3);
    for (grid, name) in grids.iter().zip(names) {
        let (sup, argmax) = grid.sup_argmax(&spec);
        entries.push(ResidualEntry { name, sup, argmax });
    }
    Ok([entries[0].clone(), entries[1].clone(), entries[2].clone()])
}

// ---------------------------------------------------------------------------
// Loop frame integration.
// ---------------------------------------------------------------------------

/// Split connection samples at one point: fixed and anti-fixed parts of both
/// matrices, from which the loop connection at any `lambda` is two scalings
/// away.
type SplitSample = (Mat4C, Mat4C, Mat4C, Mat4C);

fn split_sample(
    sd: &SurfaceData,
    dd: &DerivedData,
    x: f64,
    y: f64,
    which: SplitType,
) -> Result<SplitSample, SpectralError> {
    let (u, v) = uv_at(sd, dd, cx(x, y))?;
    let (uk, up) = split(&u, which);
    let (vk, vp) = split(&v, which);
    Ok((uk, up, vk, vp))
}

fn loop_generator(s: &SplitSample, lambda: Complex64, dx: f64, dy: f64) -> Mat4C {
    let (uk, up, vk, vp) = s;
    let ul = *uk + up.scale(lambda.finv());
    let vl = *vk + vp.scale(lambda);
    (ul + vl).scale(cx(dx, 0.0)) + (ul - vl).scale(cx(0.0, dy))
}

/// Integrate frame fields of the loop connection for a whole batch of
/// `lambda` samples. The expensive part — evaluating and splitting the
/// connection along the sweep — happens once; each `lambda` then reuses the
/// samples. Every requested `lambda` must pass the flatness gate
/// ([`FLATNESS_GATE`]), otherwise the integral would depend on the path.
pub fn integrate_loop_frames(
    sd: &SurfaceData,
    dd: &DerivedData,
    which: SplitType,
    lambdas: &[Complex64],
    sweep: Sweep,
    substeps: usize,
) -> Result<Vec<FrameField>, SpectralError> {
    for flat in flatness_residual(sd, dd, which, lambdas)? {
        if flat.sup > FLATNESS_GATE {
            return Err(SpectralError::NonFlat {
                lambda: flat.lambda,
                residual: flat.sup,
                gate: FLATNESS_GATE,
            });
        }
    }
    let spec = sd.grid;
    let cells = sweep_cells(&spec, sd.base, sweep);
    let mut cell_samples: Vec<Vec<SplitSample>> = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut samples = Vec::with_capacity(2 * substeps + 1);
        for (x, y) in cell_sample_points(cell, substeps) {
            samples.push(split_sample(sd, dd, x, y, which)?);
        }
        cell_samples.push(samples);
    }
    let mut fields = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut frames = Grid::from_fn(spec.nx, spec.ny, |_, _| Mat4C::identity());
        for (cell, samples) in cells.iter().zip(&cell_samples) {
            let start = *frames.at(cell.from.0, cell.from.1);
            let gen = |s: &SplitSample, dx: f64, dy: f64| loop_generator(s, lambda, dx, dy);
            let advanced = rk4_cell(start, samples, cell, substeps, &gen);
            *frames.at_mut(cell.target.0, cell.target.1) = advanced;
        }
        fields.push(FrameField {
            frames,
            spec,
            base: sd.base,
            sweep,
            substeps,
        });
    }
    Ok(fields)
}

/// Single-`lambda` convenience wrapper around [`integrate_loop_frames`].
pub fn integrate_loop_frame(
    sd: &SurfaceData,
    dd: &DerivedData,
    which: SplitType,
    lambda: Complex64,
    sweep: Sweep,
    substeps: usize,
) -> Result<FrameField, SpectralError> {
    Ok(integrate_loop_frames(sd, dd, which, &[lambda], sweep, substeps)?
        .pop()
        .expect("one lambda in, one frame field out"))
}

// ---------------------------------------------------------------------------
// Twisting symmetries of the FirstOrder frames.
// ---------------------------------------------------------------------------

/// Sup-norm deviations of the three frame symmetries at one `lambda`:
/// `sigma(F_l) = F_{eps l}`, `kappa(F_l) = F_{-eps l}`, `tau1(F_l) = F_{-l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistReport {
    pub lambda: Complex64,
    pub sigma: f64,
    pub kappa: f64,
    pub tau1: f64,
}

/// Measure how exactly the FirstOrder frame family carries the loop-group
/// twist: integrate frames at `lambda`, `eps lambda`, `-eps lambda` and
/// `-lambda` (one shared sampling pass) and compare nodewise.
pub fn twist_residual(
    sd: &SurfaceData,
    dd: &DerivedData,
    lambda: Complex64,
    sweep: Sweep,
    substeps: usize,
) -> Result<TwistReport, SpectralError> {
    let eps = constants::epsilon();
    let lambdas = [lambda, eps * lambda, -(eps * lambda), -lambda];
    let fields = integrate_loop_frames(sd, dd, SplitType::FirstOrder, &lambdas, sweep, substeps)?;
    let (f_l, f_el, f_mel, f_ml) = (&fields[0], &fields[1], &fields[2], &fields[3]);
    let mut rep = TwistReport {
        lambda,
        sigma: 0.0,
        kappa: 0.0,
        tau1: 0.0,
    };
    for (i, j, f) in f_l.frames.iter() {
        rep.sigma = rep.sigma.max((sigma_group(f) - *f_el.frames.at(i, j)).norm());
        rep.kappa = rep.kappa.max((kappa_group(f)? - *f_mel.frames.at(i, j)).norm());
        rep.tau1 = rep.tau1.max((tau1_group(f)? - *f_ml.frames.at(i, j)).norm());
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Z_6 grading and primitivity.
// ---------------------------------------------------------------------------

/// The sixth root of unity `omega = -eps = exp(-i pi / 3)` that indexes the
/// `kappa`-eigenspaces.
pub fn omega() -> Complex64 {
    -constants::epsilon()
}

/// Eigenprojections of a matrix under the order-6 automorphism `kappa`:
/// `component_j = (1/6) sum_m omega^{-jm} kappa^m(X)`. The components sum
/// back to `X` and `kappa` acts on component `j` by `omega^j`.
#[derive(Debug, Clone)]
pub struct KappaComponents {
    comps: [Mat4C; 6],
}

impl KappaComponents {
    /// Component of eigenvalue `omega^j`; `j` is taken modulo 6.
    pub fn component(&self, j: i32) -> &Mat4C {
        &self.comps[j.rem_euclid(6) as usize]
    }

    /// Frobenius deviation of the component sum from the original matrix.
    pub fn sum_defect(&self, x: &Mat4C) -> f64 {
        let mut s = Mat4C::zero();
        for c in &self.comps {
            s = s + *c;
        }
        (s - *x).norm()
    }
}

/// Project onto the six `kappa`-eigenspaces.
pub fn eig_project(x: &Mat4C) -> KappaComponents {
    // Powers kappa^m(x), m = 0..5.
    let mut pow = [*x; 6];
    for m in 1..6 {
        pow[m] = kappa(&pow[m - 1]);
    }
    // Exact table of omega^t, omega = exp(-i pi/3), t = 0..5.
    let r = 0.75f64.sqrt();
    let om = [
        cx(1.0, 0.0),
        cx(0.5, -r),
        cx(-0.5, -r),
        cx(-1.0, 0.0),
        cx(-0.5, r),
        cx(0.5, r),
    ];
    let sixth = cx(1.0 / 6.0, 0.0);
    let mut comps = [Mat4C::zero(); 6];
    for (j, comp) in comps.iter_mut().enumerate() {
        let mut acc = Mat4C::zero();
        for (m, p) in pow.iter().enumerate() {
            // omega^{-jm} = omega^{(6 - jm mod 6) mod 6}
            let t = (6 - (j * m) % 6) % 6;
            acc = acc + p.scale(om[t]);
        }
        *comp = acc.scale(sixth);
    }
    KappaComponents { comps }
}

/// Sup over the grid of how far the anti-fixed FirstOrder part of `U` sits
/// from the `omega^-1` eigenspace of `kappa`. Zero (to rounding) exactly for
/// Demoulin data, where the frame family is primitive.
pub fn primitivity_residual(sd: &SurfaceData, dd: &DerivedData) -> Result<f64, SpectralError> {
    let spec = sd.grid;
    let mut worst: f64 = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let (u, _) = uv_at(sd, dd, spec.z_at(i, j))?;
            let (_, up) = split(&u, SplitType::FirstOrder);
            let proj = eig_project(&up);
            worst = worst.max((up - *proj.component(-1)).norm());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Deformation family.
// ---------------------------------------------------------------------------

/// A loop frame conjugated into an ordinary frame of deformed data: the
/// frames `D(lambda) F_lambda D(lambda)^-1`, the coefficient grids read off
/// their connections, and the largest leak outside the connection shape.
#[derive(Debug, Clone)]
pub struct DeformationFrame {
    pub frames: Grid<Mat4C>,
    /// The deformed coefficient `lambda^-3 b`, read off the connection.
    pub b_new: Grid<Complex64>,
    /// The deformed invariant `lambda^-2 P`, read off the connection.
    pub p_new: Grid<Complex64>,
    /// The (unchanged) invariant `k`, read off the connection.
    pub k_new: Grid<Complex64>,
    /// Largest deviation of the conjugated connection from the exact
    /// connection shape over the grid.
    pub shape_defect: f64,
}

/// Conjugate a FirstOrder loop frame field by `D(lambda)`: the result is an
/// honest frame field again, whose connection has the exact shape of
/// [`assemble_uv`]'s output with data `b -> lambda^-3 b`, `P -> lambda^-2 P`,
/// `k -> k`. Errors if any entry leaks outside the shape beyond
/// [`DEFORMATION_SHAPE_TOL`].
pub fn deformation_frame(
    sd: &SurfaceData,
    dd: &DerivedData,
    ff: &FrameField,
    lambda: Complex64,
) -> Result<DeformationFrame, SpectralError> {
    check_unit(lambda)?;
    let d = constants::d_spec(lambda);
    let d_inv = constants::d_spec(lambda.finv());
    let spec = ff.spec;
    let frames = Grid::from_fn(spec.nx, spec.ny, |i, j| d * *ff.frames.at(i, j) * d_inv);
    let mut b_new = Grid::from_fn(spec.nx, spec.ny, |_, _| cx(0.0, 0.0));
    let mut p_new = b_new.clone();
    let mut k_new = b_new.clone();
    let mut shape_defect: f64 = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let (u, v) = uv_at(sd, dd, spec.z_at(i, j))?;
            let (ul, vl) = loop_uv(&u, &v, lambda, SplitType::FirstOrder)?;
            let ut = d * ul * d_inv;
            let vt = d * vl * d_inv;
            shape_defect = shape_defect.max(u_shape_defect(&ut)).max(v_shape_defect(&vt));
            *b_new.at_mut(i, j) = ut.m[2][1];
            *p_new.at_mut(i, j) = ut.m[0][1];
            *k_new.at_mut(i, j) = ut.m[0][2];
        }
    }
    if shape_defect > DEFORMATION_SHAPE_TOL {
        return Err(SpectralError::ShapeLeak {
            defect: shape_defect,
            tol: DEFORMATION_SHAPE_TOL,
        });
    }
    Ok(DeformationFrame {
        frames,
        b_new,
        p_new,
        k_new,
        shape_defect,
    })
}
