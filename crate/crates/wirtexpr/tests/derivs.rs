//! Symbolic derivatives checked against an independent finite-difference
//! oracle, plus the algebraic properties of the derivative operators.
//!
//! The oracle: on the slice `zb = conj(z)` an expression is a smooth function
//! of `(x, y)`, and the Wirtinger derivatives are recovered as
//! `∂z = (D_x - i D_y)/2`, `∂zb = (D_x + i D_y)/2`. Both axis derivatives are
//! taken with 5-point central differences (fourth-order accurate), which the
//! symbolic result must match to 1e-6 relative at points where the expression
//! is tame. Sampling is deterministic: a fixed-seed ChaCha stream, so a pass
//! is reproducible bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wirtexpr::{CoeffField, Dir, Expr};

const FD_STEP: f64 = 1e-3;
const FD_REL_TOL: f64 = 1e-6;
/// A point is "tame" when every derivative through order three stays below
/// this bound there — that keeps the (unseen) fifth derivative that drives
/// the finite-difference error within a comfortable margin of the tolerance.
const TAME_BOUND: f64 = 100.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Build a random expression of depth at most `depth`, biased so that the
/// transcendental nodes keep their arguments in tame ranges.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => Expr::z(),
            1 => Expr::zb(),
            2 => Expr::real(rng.gen_range(-2.0..2.0)),
            _ => Expr::constant(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))),
        };
    }
    match rng.gen_range(0..12) {
        0 => Expr::z(),
        1 => Expr::zb(),
        2 => Expr::constant(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))),
        3 => random_expr(rng, depth - 1).neg(),
        4 => random_expr(rng, depth - 1).conj(),
        // Scale transcendental arguments down so nested exponentials do not
        // explode past every tame sampling point.
        5 => Expr::real(0.25).mul(&random_expr(rng, depth - 1)).exp(),
        6 => Expr::real(3.0)
            .add(&Expr::real(0.25).mul(&random_expr(rng, depth - 1)))
            .log(),
        7 => random_expr(rng, depth - 1).add(&random_expr(rng, depth - 1)),
        8 => random_expr(rng, depth - 1).sub(&random_expr(rng, depth - 1)),
        9 => random_expr(rng, depth - 1).mul(&random_expr(rng, depth - 1)),
        10 => random_expr(rng, depth - 1).div(&random_expr(rng, depth - 1)),
        _ => random_expr(rng, depth - 1).pow(rng.gen_range(-3..=3)),
    }
}

/// Find a point where the field and all cached derivatives are finite and
/// bounded, so finite differences are trustworthy there.
fn tame_point(rng: &mut ChaCha8Rng, field: &CoeffField) -> Option<Complex64> {
    'candidates: for _ in 0..60 {
        let z0 = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
        for a in 0..=3 {
            for b in 0..=(3 - a) {
                match field.eval(a, b, z0) {
                    Ok(v) if v.norm() <= TAME_BOUND => {}
                    _ => continue 'candidates,
                }
            }
        }
        // The stencil points must evaluate cleanly too.
        for dx in -2i32..=2 {
            for dy in -2i32..=2 {
                let q = z0 + c(f64::from(dx) * FD_STEP, f64::from(dy) * FD_STEP);
                match field.eval(0, 0, q) {
                    Ok(v) if v.norm() <= 10.0 * TAME_BOUND => {}
                    _ => continue 'candidates,
                }
            }
        }
        return Some(z0);
    }
    None
}

/// 5-point central difference along one axis of the slice function.
fn axis_diff(e: &Expr, z0: Complex64, axis: Complex64) -> Complex64 {
    let f = |j: f64| e.eval(z0 + axis * j * FD_STEP).unwrap();
    (f(-2.0) - f(-1.0) * 8.0 + f(1.0) * 8.0 - f(2.0)) / (12.0 * FD_STEP)
}

fn fd_wirtinger(e: &Expr, z0: Complex64) -> (Complex64, Complex64) {
    let dx = axis_diff(e, z0, c(1.0, 0.0));
    let dy = axis_diff(e, z0, c(0.0, 1.0));
    let i = c(0.0, 1.0);
    ((dx - i * dy) * 0.5, (dx + i * dy) * 0.5)
}

#[test]
fn symbolic_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57ab_1e5e_ed01);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 3000, "tame sample points became too scarce");
        let e = random_expr(&mut rng, 5);
        let field = CoeffField::new(e.clone());
        let Some(z0) = tame_point(&mut rng, &field) else {
            continue;
        };
        let (fd_z, fd_zb) = fd_wirtinger(&e, z0);
        let ex_z = field.eval(1, 0, z0).unwrap();
        let ex_zb = field.eval(0, 1, z0).unwrap();
        let tol_z = FD_REL_TOL * ex_z.norm().max(1.0);
        let tol_zb = FD_REL_TOL * ex_zb.norm().max(1.0);
        assert!(
            (fd_z - ex_z).norm() <= tol_z,
            "dz mismatch for `{e}` at {z0}: fd {fd_z} vs symbolic {ex_z}"
        );
        assert!(
            (fd_zb - ex_zb).norm() <= tol_zb,
            "dzb mismatch for `{e}` at {z0}: fd {fd_zb} vs symbolic {ex_zb}"
        );
        checked += 1;
    }
}

#[test]
fn derivative_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ea_11ea);
    for _ in 0..50 {
        let a = random_expr(&mut rng, 4);
        let b = random_expr(&mut rng, 4);
        let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let beta = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = Expr::constant(alpha)
            .mul(&a)
            .add(&Expr::constant(beta).mul(&b));
        for dir in [Dir::Dz, Dir::Dzb] {
            let lhs = combo.wirtinger(dir);
            let da = a.wirtinger(dir);
            let db = b.wirtinger(dir);
            let mut tested = 0;
            for _ in 0..40 {
                let z0 = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
                let (Ok(l), Ok(va), Ok(vb)) = (lhs.eval(z0), da.eval(z0), db.eval(z0)) else {
                    continue;
                };
                let r = alpha * va + beta * vb;
                if l.norm() > 1e6 || r.norm() > 1e6 {
                    continue;
                }
                assert!(
                    (l - r).norm() <= 1e-12 * l.norm().max(1.0),
                    "linearity failed for `{combo}` at {z0}"
                );
                tested += 1;
                if tested >= 5 {
                    break;
                }
            }
        }
    }
}

#[test]
fn conjugation_swaps_the_derivative_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_4a1e);
    for _ in 0..50 {
        let e = random_expr(&mut rng, 4);
        let lhs = e.conj().wirtinger(Dir::Dz);
        let rhs = e.wirtinger(Dir::Dzb).conj();
        for _ in 0..10 {
            let z0 = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let (Ok(l), Ok(r)) = (lhs.eval(z0), rhs.eval(z0)) else {
                continue;
            };
            if l.norm() > 1e6 {
                continue;
            }
            assert!(
                (l - r).norm() <= 1e-12 * l.norm().max(1.0),
                "conjugation symmetry failed for `{e}` at {z0}"
            );
        }
    }
}

#[test]
fn mixed_partials_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c0_5e11);
    for _ in 0..50 {
        let e = random_expr(&mut rng, 4);
        let zzb = e.wirtinger(Dir::Dz).wirtinger(Dir::Dzb);
        let zbz = e.wirtinger(Dir::Dzb).wirtinger(Dir::Dz);
        for _ in 0..10 {
            let z0 = c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let (Ok(l), Ok(r)) = (zzb.eval(z0), zbz.eval(z0)) else {
                continue;
            };
            if l.norm() > 1e6 {
                continue;
            }
            assert!(
                (l - r).norm() <= 1e-12 * l.norm().max(1.0),
                "mixed partials disagree for `{e}` at {z0}"
            );
        }
    }
}
