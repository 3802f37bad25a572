//! Connection matrices, frame integration, and the lift: pinned shapes,
//! structural relations, convergence order, and failure detection.

use num_complex::Complex64;
use projframe::frame::{
    assemble_uv, integrate_frame, lift_column_residual, path_independence_residual, realify,
    surface_lift, u_shape_defect, uv_at, v_shape_defect, Sweep, DEFAULT_SUBSTEPS,
};
use projframe::linalg::{constants, Mat4C};
use projframe::surface::{catalog, derive_kp, entries, DerivedData, SurfaceData};
use wirtexpr::Expr;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn connection_of_constant_data_is_pinned() {
    let sd = entries::const_demoulin(1.0, 0.25).unwrap();
    let dd = derive_kp(&sd);
    let (u, v) = uv_at(&sd, &dd, cx(0.5, 0.25)).unwrap();
    // b = 1, P = 0, k = 1/2, beta = gamma = 0.
    let want_u = Mat4C::from_real(&[
        [0.0, 0.0, 0.5, 0.0],
        [1.0, 0.0, 0.0, 0.5],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]);
    let want_v = Mat4C::from_real(&[
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 0.5],
        [0.0, 1.0, 0.0, 0.0],
    ]);
    assert!((u - want_u).max_abs() <= 1e-14);
    assert!((v - want_v).max_abs() <= 1e-14);
}

#[test]
fn conjugating_the_connection_swaps_u_and_v() {
    // conj(U) = C V C with C the middle swap, at generic points of a
    // non-constant geometry.
    let sd = entries::liouville_demoulin(0.11).unwrap();
    let dd = derive_kp(&sd);
    let c = constants::c_swap();
    for (x, y) in [(0.11, -0.22), (-0.33, 0.44), (0.0, 0.55)] {
        let (u, v) = uv_at(&sd, &dd, cx(x, y)).unwrap();
        assert!((u.conj() - c * v * c).max_abs() <= 1e-13);
    }
}

#[test]
fn connection_shape_probes_accept_the_real_thing_and_flag_damage() {
    let sd = catalog("nonminimal_linear").unwrap();
    let dd = derive_kp(&sd);
    let (u, v) = uv_at(&sd, &dd, cx(0.3, 0.7)).unwrap();
    assert!(u_shape_defect(&u) <= 1e-14);
    assert!(v_shape_defect(&v) <= 1e-14);
    // Any single forbidden entry is noticed.
    let mut broken = u;
    broken.m[3][0] = cx(1e-3, 0.0);
    assert!(u_shape_defect(&broken) >= 1e-3);
    let mut broken = v;
    broken.m[2][1] = cx(0.0, 1e-3);
    assert!(v_shape_defect(&broken) >= 1e-3);
}

#[test]
fn symbolic_connection_derivatives_match_finite_differences() {
    let sd = entries::liouville_demoulin(0.11).unwrap();
    let dd = derive_kp(&sd);
    let h = 1e-4;
    let z = cx(0.22, -0.11);
    let pair = assemble_uv(&sd, &dd, z).unwrap();
    // d/dzb = (d/dx + i d/dy)/2 entrywise on U.
    let u = |z: Complex64| uv_at(&sd, &dd, z).unwrap().0;
    let du_dx = (u(z + cx(h, 0.0)) - u(z - cx(h, 0.0))).scale(cx(1.0 / (2.0 * h), 0.0));
    let du_dy = (u(z + cx(0.0, h)) - u(z - cx(0.0, h))).scale(cx(1.0 / (2.0 * h), 0.0));
    let fd = (du_dx + du_dy.scale(cx(0.0, 1.0))).scale(cx(0.5, 0.0));
    assert!((pair.u_dzb - fd).max_abs() <= 1e-6);
    // d/dz entrywise on V.
    let v = |z: Complex64| uv_at(&sd, &dd, z).unwrap().1;
    let dv_dx = (v(z + cx(h, 0.0)) - v(z - cx(h, 0.0))).scale(cx(1.0 / (2.0 * h), 0.0));
    let dv_dy = (v(z + cx(0.0, h)) - v(z - cx(0.0, h))).scale(cx(1.0 / (2.0 * h), 0.0));
    let fd = (dv_dx - dv_dy.scale(cx(0.0, 1.0))).scale(cx(0.5, 0.0));
    assert!((pair.v_dz - fd).max_abs() <= 1e-6);
}

#[test]
fn integrated_frames_are_unimodular_and_real_in_the_hatted_basis() {
    let sd = entries::liouville_demoulin(0.055).unwrap();
    let dd = derive_kp(&sd);
    let ff = integrate_frame(&sd, &dd, Sweep::XThenY, DEFAULT_SUBSTEPS).unwrap();
    // The base node carries the identity exactly.
    assert!((*ff.frames.at(ff.base.0, ff.base.1) - Mat4C::identity()).max_abs() == 0.0);
    assert!(ff.det_defect() <= 1e-9, "det defect {:.3e}", ff.det_defect());
    assert!(
        ff.reality_defect() <= 1e-7,
        "reality defect {:.3e}",
        ff.reality_defect()
    );
    let rf = realify(&ff);
    assert!(rf.max_imag <= 1e-7, "realified imag {:.3e}", rf.max_imag);
}

#[test]
fn flat_data_integrates_path_independently_and_damage_is_loud() {
    let sd = entries::const_demoulin(1.0, 0.1).unwrap();
    let dd = derive_kp(&sd);
    let (good, _) = path_independence_residual(&sd, &dd, 6).unwrap();
    assert!(good <= 1e-10, "residual {good:.3e}");
    // Corrupt the derived invariant k by a constant: the connection pair no
    // longer satisfies any zero-curvature relation, and the two sweep orders
    // disagree at order one.
    let broken = DerivedData {
        k: wirtexpr::CoeffField::new(dd.k.expr().add(&Expr::real(0.1))),
        cap_p: dd.cap_p.clone(),
    };
    let (bad, _) = path_independence_residual(&sd, &broken, 6).unwrap();
    assert!(bad >= 1e-3, "corrupted residual {bad:.3e}");
}

#[test]
fn lift_chart_and_column_relation_behave() {
    let sd = entries::const_demoulin(1.0, 0.1).unwrap();
    let dd = derive_kp(&sd);
    let ff = integrate_frame(&sd, &dd, Sweep::XThenY, DEFAULT_SUBSTEPS).unwrap();
    let rf = realify(&ff);
    let lift = surface_lift(&rf);
    // At the base the lift is the first basis direction, chart (0, 0, 0).
    let base = lift.at(ff.base.0, ff.base.1);
    assert!((base.homogeneous[0] - 1.0).abs() <= 1e-12);
    let chart = base.chart.expect("base chart must exist");
    assert!(chart.iter().all(|c| c.abs() <= 1e-12));
    // The first-column relation: second frame column = f_z - beta f, with
    // second-order finite differences, so the residual decays like h^2.
    let coarse = lift_column_residual(&sd, &ff).unwrap();
    let sd2 = entries::const_demoulin(1.0, 0.05).unwrap();
    let dd2 = derive_kp(&sd2);
    let ff2 = integrate_frame(&sd2, &dd2, Sweep::XThenY, DEFAULT_SUBSTEPS).unwrap();
    let fine = lift_column_residual(&sd2, &ff2).unwrap();
    let ratio = coarse / fine;
    assert!(
        (3.0..=5.5).contains(&ratio),
        "expected quadratic decay, got ratio {ratio:.2} ({coarse:.3e} -> {fine:.3e})"
    );
}

#[test]
fn small_coefficient_points_are_refused_outside_the_validated_grid() {
    // The grid keeps |b| >= 1, but the connection can still be asked for at
    // arbitrary points; near the zero of b it must refuse rather than emit
    // garbage.
    let rect = projframe::surface::Rect {
        x0: 1.0,
        x1: 2.0,
        y0: 0.0,
        y1: 1.0,
    };
    let sd = SurfaceData::new(rect, 0.25, (1.0, 0.0), Expr::z(), Expr::zero()).unwrap();
    let dd = derive_kp(&sd);
    assert!(uv_at(&sd, &dd, cx(1.5, 0.5)).is_ok());
    assert!(matches!(
        uv_at(&sd, &dd, cx(1e-9, 0.0)),
        Err(projframe::frame::FrameError::SmallB { .. })
    ));
}
