//! Dense 4x4 complex matrices and the handful of constant matrices the
//! frame pipeline is built from.
//!
//! Everything here is deliberately small and fixed-size: 4x4 complex
//! matrices with row-major storage, exterior squares of real 4-vectors, a
//! scaling-and-squaring matrix exponential and a cyclic Jacobi eigensolver
//! for real symmetric matrices. No pivot-order or thread nondeterminism
//! anywhere — identical inputs give bit-identical outputs.

// Fixed-size kernels read better with explicit indices.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

/// Errors from the numerical kernels in this module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    /// A matrix needed to be invertible but its determinant is numerically zero.
    #[error("matrix is numerically singular (|det| = {det:.3e})")]
    Singular { det: f64 },
    /// A matrix fed to the symmetric eigensolver was not symmetric.
    #[error("matrix is not symmetric (defect {defect:.3e} exceeds {tol:.0e})")]
    NotSymmetric { defect: f64, tol: f64 },
    /// An eigenvalue sat too close to zero for a signature to be trustworthy.
    #[error("eigenvalue {value:.3e} is too close to zero to assign a sign")]
    NearZeroEigenvalue { value: f64 },
}

/// Symmetry defect above which [`signature4`] refuses to classify.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues below this magnitude cannot be given a trustworthy sign.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;
/// Determinants below this magnitude count as singular.
const DET_FLOOR: f64 = 1e-300;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4C {
    pub m: [[Complex64; 4]; 4],
}

impl Mat4C {
    pub fn zero() -> Self {
        Mat4C {
            m: [[cx(0.0, 0.0); 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut a = Mat4C::zero();
        for i in 0..4 {
            a.m[i][i] = cx(1.0, 0.0);
        }
        a
    }

    pub fn diag(d: [Complex64; 4]) -> Self {
        let mut a = Mat4C::zero();
        for i in 0..4 {
            a.m[i][i] = d[i];
        }
        a
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        Mat4C { m: rows }
    }

    /// Build from a real matrix.
    pub fn from_real(r: &[[f64; 4]; 4]) -> Self {
        let mut a = Mat4C::zero();
        for i in 0..4 {
            for j in 0..4 {
                a.m[i][j] = cx(r[i][j], 0.0);
            }
        }
        a
    }

    pub fn transpose(&self) -> Self {
        let mut a = Mat4C::zero();
        for i in 0..4 {
            for j in 0..4 {
                a.m[i][j] = self.m[j][i];
            }
        }
        a
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut a = *self;
        for row in a.m.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        a
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2] + self.m[3][3]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for row in &self.m {
            for v in row {
                s += v.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut s: f64 = 0.0;
        for row in &self.m {
            for v in row {
                s = s.max(v.norm());
            }
        }
        s
    }

    /// Real parts, as a plain real matrix.
    pub fn real_part(&self) -> [[f64; 4]; 4] {
        let mut r = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                r[i][j] = self.m[i][j].re;
            }
        }
        r
    }

    /// Largest imaginary part in modulus (diagnostic for matrices expected
    /// to be real).
    pub fn max_imag(&self) -> f64 {
        let mut s: f64 = 0.0;
        for row in &self.m {
            for v in row {
                s = s.max(v.im.abs());
            }
        }
        s
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut a = *self;
        for row in a.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        a
    }

    /// Determinant by cofactor expansion along the first row — branch-free
    /// and deterministic.
    pub fn det(&self) -> Complex64 {
        let m = &self.m;
        let minor = |r: [usize; 3], c: [usize; 3]| -> Complex64 {
            m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
                - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
                + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
        };
        m[0][0] * minor([1, 2, 3], [1, 2, 3]) - m[0][1] * minor([1, 2, 3], [0, 2, 3])
            + m[0][2] * minor([1, 2, 3], [0, 1, 3])
            - m[0][3] * minor([1, 2, 3], [0, 1, 2])
    }

    /// Inverse via the adjugate — deterministic, no pivoting. Errors when the
    /// determinant is numerically zero.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let d = self.det();
        if d.norm() < DET_FLOOR {
            return Err(LinalgError::Singular { det: d.norm() });
        }
        let m = &self.m;
        let mut inv = Mat4C::zero();
        for i in 0..4 {
            for j in 0..4 {
                // Cofactor C_ij: signed 3x3 minor with row i, column j removed.
                let r: [usize; 3] = {
                    let mut r = [0; 3];
                    let mut t = 0;
                    for k in 0..4 {
                        if k != i {
                            r[t] = k;
                            t += 1;
                        }
                    }
                    r
                };
                let c: [usize; 3] = {
                    let mut c = [0; 3];
                    let mut t = 0;
                    for k in 0..4 {
                        if k != j {
                            c[t] = k;
                            t += 1;
                        }
                    }
                    c
                };
                let det3 = m[r[0]][c[0]]
                    * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
                    - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
                    + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]]);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                // Adjugate is the transpose of the cofactor matrix.
                inv.m[j][i] = det3 * sign / d;
            }
        }
        Ok(inv)
    }
}

impl std::ops::Add for Mat4C {
    type Output = Mat4C;
    fn add(self, rhs: Mat4C) -> Mat4C {
        let mut a = self;
        for i in 0..4 {
            for j in 0..4 {
                a.m[i][j] += rhs.m[i][j];
            }
        }
        a
    }
}

impl std::ops::Sub for Mat4C {
    type Output = Mat4C;
    fn sub(self, rhs: Mat4C) -> Mat4C {
        let mut a = self;
        for i in 0..4 {
            for j in 0..4 {
                a.m[i][j] -= rhs.m[i][j];
            }
        }
        a
    }
}

impl std::ops::Mul for Mat4C {
    type Output = Mat4C;
    fn mul(self, rhs: Mat4C) -> Mat4C {
        let mut out = Mat4C::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.m[i][k];
                for j in 0..4 {
                    out.m[i][j] += a * rhs.m[k][j];
                }
            }
        }
        out
    }
}

impl std::ops::Neg for Mat4C {
    type Output = Mat4C;
    fn neg(self) -> Mat4C {
        self.scale(cx(-1.0, 0.0))
    }
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &Mat4C, b: &Mat4C) -> Mat4C {
    *a * *b - *b * *a
}

/// Matrix exponential by scaling and squaring with a Taylor tail.
///
/// The argument is halved until its Frobenius norm is at most 1/2, the series
/// is summed until the running term falls below 1e-20 of the partial sum, and
/// the result is squared back up. For norms up to ~10 this stays within
/// 1e-12 relative of the exact exponential, which the tests pin against
/// closed-form cases.
pub fn mat_exp(a: &Mat4C) -> Mat4C {
    let norm = a.norm();
    let mut squarings = 0u32;
    let mut scaled = *a;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        // 2^-squarings is a power of two, so the scaling is exact.
        scaled = a.scale(cx((0.5f64).powi(squarings as i32), 0.0));
    }
    let mut sum = Mat4C::identity();
    let mut term = Mat4C::identity();
    for k in 1..=40 {
        term = term * scaled;
        term = term.scale(cx(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.norm() <= 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigenvalues of a real symmetric matrix by the cyclic Jacobi method.
/// Returns them in ascending order. Deterministic: fixed sweep order, fixed
/// convergence threshold.
pub fn jacobi_eigenvalues<const N: usize>(a: &[[f64; N]; N]) -> [f64; N] {
    let mut m = *a;
    let scale: f64 = {
        let mut s: f64 = 0.0;
        for row in &m {
            for v in row {
                s = s.max(v.abs());
            }
        }
        s.max(1.0)
    };
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off = off.max(m[p][q].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if m[p][q].abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q.
                for k in 0..N {
                    let akp = m[k][p];
                    let akq = m[k][q];
                    m[k][p] = c * akp - s * akq;
                    m[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = m[p][k];
                    let aqk = m[q][k];
                    m[p][k] = c * apk - s * aqk;
                    m[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig = [0.0; N];
    for i in 0..N {
        eig[i] = m[i][i];
    }
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Signature `(n_plus, n_minus)` of a real symmetric 4x4 matrix.
///
/// Errors if the symmetry defect exceeds [`SYMMETRY_TOL`] or any eigenvalue
/// has modulus below [`EIGENVALUE_FLOOR`] — a sign cannot be trusted across
/// either condition.
pub fn signature4(q: &[[f64; 4]; 4]) -> Result<(usize, usize), LinalgError> {
    let mut defect: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            defect = defect.max((q[i][j] - q[j][i]).abs());
        }
    }
    if defect > SYMMETRY_TOL {
        return Err(LinalgError::NotSymmetric {
            defect,
            tol: SYMMETRY_TOL,
        });
    }
    let eig = jacobi_eigenvalues(q);
    let mut plus = 0;
    let mut minus = 0;
    for &mu in &eig {
        if mu.abs() < EIGENVALUE_FLOOR {
            return Err(LinalgError::NearZeroEigenvalue { value: mu });
        }
        if mu > 0.0 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    Ok((plus, minus))
}

// ---------------------------------------------------------------------------
// Exterior squares of real 4-vectors.
// ---------------------------------------------------------------------------

/// A real homogeneous 4-vector.
pub type Vec4R = [f64; 4];

/// An element of the exterior square of R^4, stored in the basis order
/// `(e0^e1, e0^e2, e0^e3, e1^e2, e3^e1, e2^e3)` — i.e. components
/// `(p01, p02, p03, p12, p31, p23)`. The last three slots pair anti-diagonally
/// with the first three under [`pl_inner`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge6 {
    pub c: [f64; 6],
}

impl Wedge6 {
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Index pairs of the [`Wedge6`] basis, in storage order.
pub const WEDGE_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (3, 1), (2, 3)];

/// Exterior product of two real 4-vectors, components `p_ij = a_i b_j - a_j b_i`
/// in the [`Wedge6`] basis order.
pub fn wedge(a: &Vec4R, b: &Vec4R) -> Wedge6 {
    let p = |i: usize, j: usize| a[i] * b[j] - a[j] * b[i];
    Wedge6 {
        c: [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(3, 1), p(2, 3)],
    }
}

/// The split-signature pairing on the exterior square: the anti-diagonal sum
/// `x_1 y_6 + x_2 y_5 + x_3 y_4 + x_4 y_3 + x_5 y_2 + x_6 y_1` (1-based).
/// Its Gram matrix has signature (3,3), and decomposable elements are exactly
/// its null vectors.
pub fn pl_inner(x: &Wedge6, y: &Wedge6) -> f64 {
    let mut s = 0.0;
    for i in 0..6 {
        s += x.c[i] * y.c[5 - i];
    }
    s
}

/// Gram matrix of [`pl_inner`] in the storage basis (for rank/signature checks).
pub fn pl_gram() -> [[f64; 6]; 6] {
    let mut g = [[0.0; 6]; 6];
    for i in 0..6 {
        g[i][5 - i] = 1.0;
    }
    g
}

/// The matrix of the induced map on the exterior square: column `j` holds the
/// components of `g a ^ g b` where `(a, b)` is the `j`-th basis pair. For
/// `det g = 1` this matrix preserves [`pl_inner`].
pub fn wedge2_matrix(g: &[[f64; 4]; 4]) -> [[f64; 6]; 6] {
    let col = |j: usize| -> Vec4R { [g[0][j], g[1][j], g[2][j], g[3][j]] };
    let mut m = [[0.0; 6]; 6];
    for (jdx, &(a, b)) in WEDGE_BASIS.iter().enumerate() {
        let w = wedge(&col(a), &col(b));
        for i in 0..6 {
            m[i][jdx] = w.c[i];
        }
    }
    m
}

/// Apply a 6x6 matrix to a [`Wedge6`].
pub fn wedge2_apply(m: &[[f64; 6]; 6], x: &Wedge6) -> Wedge6 {
    let mut out = [0.0; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[i] += m[i][j] * x.c[j];
        }
    }
    Wedge6 { c: out }
}

// ---------------------------------------------------------------------------
// Constant matrices.
// ---------------------------------------------------------------------------

/// The constant matrices the frame pipeline is phrased in: the change of
/// basis that realifies frames, the two quadric seeds and their realified
/// forms, the order-3 twist generator, the spectral-direction diagonal and
/// the coordinate swap that implements complex conjugation of connections.
pub mod constants {
    use super::{cx, Complex64, Mat4C};

    /// Primitive cube root of unity `exp(2 pi i / 3)`.
    pub fn epsilon() -> Complex64 {
        // Exact components: cos(2pi/3) = -1/2, sin(2pi/3) = sqrt(3)/2.
        cx(-0.5, 0.75f64.sqrt())
    }

    /// Change of basis `L` taking complex frames to real ones: identity on the
    /// outer coordinates, and the middle 2x2 block maps `(v1, v2)` to
    /// `((i v1 - i v2)/sqrt 2, (v1 + v2)/sqrt 2)`. Unitary, and
    /// `conj(L) = L * c_swap()`, which is what makes conjugation of a frame
    /// an inner operation downstairs.
    pub fn l() -> Mat4C {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat4C::from_rows([
            [cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)],
            [cx(0.0, 0.0), cx(0.0, s), cx(0.0, -s), cx(0.0, 0.0)],
            [cx(0.0, 0.0), cx(s, 0.0), cx(s, 0.0), cx(0.0, 0.0)],
            [cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)],
        ])
    }

    /// Inverse of [`l`] (its conjugate transpose — `l` is unitary).
    pub fn l_inv() -> Mat4C {
        l().adjoint()
    }

    /// First quadric seed: the anti-diagonal pairing on the middle and outer
    /// index pairs, `J1[i][j] = 1` iff `i + j = 3`.
    pub fn j1() -> Mat4C {
        let mut a = Mat4C::zero();
        for i in 0..4 {
            a.m[i][3 - i] = cx(1.0, 0.0);
        }
        a
    }

    /// Realified form of [`j1`]: `L J1 L^T`. Concretely
    /// `antidiag(1, .., ..) with the middle block diagonalized`:
    /// rows `[[0,0,0,1],[0,1,0,0],[0,0,1,0],[1,0,0,0]]`.
    pub fn j1_hat() -> Mat4C {
        Mat4C::from_real(&[
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ])
    }

    /// Second quadric seed: anti-diagonal `(1, -1, -1, 1)` from the top.
    pub fn j2() -> Mat4C {
        let mut a = Mat4C::zero();
        a.m[0][3] = cx(1.0, 0.0);
        a.m[1][2] = cx(-1.0, 0.0);
        a.m[2][1] = cx(-1.0, 0.0);
        a.m[3][0] = cx(1.0, 0.0);
        a
    }

    /// Realified form of [`j2`]: `-L J2 L^T`, concretely
    /// rows `[[0,0,0,-1],[0,1,0,0],[0,0,1,0],[-1,0,0,0]]`.
    pub fn j2_hat() -> Mat4C {
        Mat4C::from_real(&[
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ])
    }

    /// Order-3 twist generator `diag(1, eps^2, eps, 1)` with
    /// `eps = exp(2 pi i/3)`: `E^3 = id` and `det E = 1`.
    pub fn e_twist() -> Mat4C {
        let eps = epsilon();
        Mat4C::diag([cx(1.0, 0.0), eps * eps, eps, cx(1.0, 0.0)])
    }

    /// Spectral diagonal `D(lambda) = diag(1, lambda, 1/lambda, 1)`.
    /// Callers keep `lambda` away from zero (it is used on the unit circle).
    pub fn d_spec(lambda: Complex64) -> Mat4C {
        Mat4C::diag([cx(1.0, 0.0), lambda, lambda.finv(), cx(1.0, 0.0)])
    }

    /// Permutation swapping the two middle coordinates. Conjugation by it
    /// implements `U <-> conj(V)` for the connection pairs downstream, and
    /// `conj(L) = L * c_swap()`.
    pub fn c_swap() -> Mat4C {
        Mat4C::from_real(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }
}
