//! Surface data validation, derived invariants, residual reports, and the
//! classifier, exercised on the built-in catalog and on deliberately broken
//! data.

use num_complex::Complex64;
use projframe::surface::{
    canonical_integrability_residual, catalog, classify, derive_kp, entries,
    gauss_codazzi_residual, residual_report, Grid, GridSpec, Rect, SurfaceClass, SurfaceData,
    SurfaceError, CATALOG_NAMES,
};
use wirtexpr::{parse, Dir, Expr};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn data_from(b: &str, p: &str, rect: Rect, h: f64, base: (f64, f64)) -> Result<SurfaceData, SurfaceError> {
    let b = parse(b).unwrap();
    let p = parse(p).unwrap();
    SurfaceData::new(rect, h, base, b, p)
}

#[test]
fn grid_spec_rejects_bad_geometry() {
    let rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    assert!(matches!(
        GridSpec::new(rect, -0.1),
        Err(SurfaceError::InvalidStep { .. })
    ));
    // 1/0.3 is not an integer number of steps.
    assert!(matches!(
        GridSpec::new(rect, 0.3),
        Err(SurfaceError::InvalidDomain { .. })
    ));
    let spec = GridSpec::new(rect, 0.25).unwrap();
    assert_eq!((spec.nx, spec.ny), (5, 5));
    assert_eq!(spec.z_at(4, 0), cx(1.0, 0.0));
}

#[test]
fn surface_data_rejects_poles_and_small_coefficients() {
    let rect = Rect {
        x0: -0.5,
        x1: 0.5,
        y0: -0.5,
        y1: 0.5,
    };
    // b = 1/(1 - z zb) has |b| >= 1 here and works.
    assert!(data_from("1/(1 - z*zb)", "0", rect, 0.25, (0.0, 0.0)).is_ok());
    // b with a pole inside the domain is caught at construction.
    assert!(matches!(
        data_from("1/(z - (0.25 + 0.25*i))", "0", rect, 0.25, (0.0, 0.0)),
        Err(SurfaceError::Pole { .. })
    ));
    // b vanishing at a node is caught by the modulus floor.
    assert!(matches!(
        data_from("z", "0", rect, 0.25, (0.0, 0.0)),
        Err(SurfaceError::SmallCoefficient { .. })
    ));
    // A base point off the grid is rejected.
    assert!(matches!(
        data_from("1", "0", rect, 0.25, (0.1, 0.0)),
        Err(SurfaceError::InvalidBase { .. })
    ));
}

#[test]
fn derived_invariants_match_hand_values_on_constant_data() {
    let sd = entries::const_demoulin(2.0, 0.25).unwrap();
    let dd = derive_kp(&sd);
    // b = 2, p = 0: k = |b|^2 / 2 = 2, P = 0.
    for (z_re, z_im) in [(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)] {
        let z = cx(z_re, z_im);
        assert!((dd.k.eval(0, 0, z).unwrap() - cx(2.0, 0.0)).norm() <= 1e-14);
        assert!(dd.cap_p.eval(0, 0, z).unwrap().norm() <= 1e-14);
    }
}

#[test]
fn curvature_identity_holds_for_the_disc_metric() {
    // 2k + (log b)_zzb - |b|^2 = 0 by construction of k.
    let sd = entries::liouville_demoulin(0.11).unwrap();
    let dd = derive_kp(&sd);
    let b = sd.b.expr().clone();
    let logb_zzb = b.log().wirtinger(Dir::Dz).wirtinger(Dir::Dzb);
    for (x, y) in [(0.0, 0.0), (0.22, -0.11), (-0.44, 0.33)] {
        let z = cx(x, y);
        let k = dd.k.eval(0, 0, z).unwrap();
        let lb = logb_zzb.eval(z).unwrap();
        let b_val = sd.b.eval(0, 0, z).unwrap();
        let defect = 2.0 * k + lb - b_val * b_val.conj();
        assert!(defect.norm() <= 1e-12);
    }
}

#[test]
fn liouville_entry_is_demoulin_to_rounding() {
    let sd = entries::liouville_demoulin(0.11).unwrap();
    let dd = derive_kp(&sd);
    let spec = sd.grid;
    let mut sup: f64 = 0.0;
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            sup = sup.max(dd.cap_p.eval(0, 0, spec.z_at(i, j)).unwrap().norm());
        }
    }
    assert!(sup <= 1e-12, "sup |P| = {sup:.3e}");
}

#[test]
fn compatibility_residuals_vanish_on_catalog_entries() {
    for name in CATALOG_NAMES {
        let sd = catalog(name).unwrap();
        let dd = derive_kp(&sd);
        let rep = gauss_codazzi_residual(&sd, &dd).unwrap();
        let comp1 = rep.sup("comp1").unwrap();
        let comp2 = rep.sup("comp2").unwrap();
        assert!(
            comp1 <= 1e-10 && comp2 <= 1e-10,
            "{name}: comp1 = {comp1:.3e}, comp2 = {comp2:.3e}"
        );
    }
}

#[test]
fn canonical_residuals_vanish_on_catalog_and_flag_broken_data() {
    for name in CATALOG_NAMES {
        let sd = catalog(name).unwrap();
        let rep = canonical_integrability_residual(&sd).unwrap();
        assert!(rep.sup("canon1").unwrap() <= 1e-10, "{name}");
        assert!(rep.sup("canon2").unwrap() <= 1e-10, "{name}");
    }
    // b = 1, p = zb is not canonically integrable: canon1 = |p_zb| = 1.
    let rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    let sd = data_from("1", "zb", rect, 0.25, (0.0, 0.0)).unwrap();
    let rep = canonical_integrability_residual(&sd).unwrap();
    let canon1 = rep.sup("canon1").unwrap();
    assert!((canon1 - 1.0).abs() <= 1e-12, "canon1 = {canon1}");
}

#[test]
fn residual_report_lists_all_six_measures_in_order() {
    let sd = catalog("nonminimal_linear").unwrap();
    let dd = derive_kp(&sd);
    let rep = residual_report(&sd, &dd).unwrap();
    let names: Vec<&str> = rep.entries.iter().map(|e| e.name).collect();
    assert_eq!(
        names,
        ["comp1", "comp2", "projmin", "demoulin", "canon1", "canon2"]
    );
    // Nonminimal data: compatibility and canonical residuals vanish, the
    // minimality and Demoulin defects do not.
    assert!(rep.sup("comp1").unwrap() <= 1e-10);
    assert!(rep.sup("projmin").unwrap() >= 0.9);
    assert!(rep.sup("demoulin").unwrap() >= 0.9);
}

#[test]
fn classifier_sorts_the_catalog() {
    let tol = 1e-8;
    let cases = [
        ("const_demoulin", SurfaceClass::Demoulin, false),
        ("liouville_demoulin", SurfaceClass::Demoulin, false),
        ("coincidence_minimal", SurfaceClass::ProjectiveMinimal, true),
        ("nonminimal_linear", SurfaceClass::Generic, false),
    ];
    for (name, class, coincidence) in cases {
        let sd = catalog(name).unwrap();
        let c = classify(&sd, tol).unwrap();
        assert_eq!(c.class, class, "{name}");
        assert_eq!(c.coincidence, coincidence, "{name}");
    }
}

#[test]
fn classifier_refuses_data_that_is_not_a_surface() {
    let rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    // b = 1, p = i z breaks the reality constraint (comp2 != 0).
    let sd = data_from("1", "i*z", rect, 0.25, (0.0, 0.0)).unwrap();
    match classify(&sd, 1e-8) {
        Err(SurfaceError::NotASurface { comp2, .. }) => assert!(comp2 > 1e-3),
        other => panic!("expected NotASurface, got {other:?}"),
    }
}

#[test]
fn zcr_triple_isolates_the_minimality_defect_on_nonminimal_data() {
    let sd = catalog("nonminimal_linear").unwrap();
    let c = classify(&sd, 1e-8).unwrap();
    let [dzb_p, dzb_k, minim] = &c.zcr_first_order;
    assert!(dzb_p.sup <= 1e-12, "dzb_P = {:.3e}", dzb_p.sup);
    assert!(dzb_k.sup <= 1e-12, "dzb_k = {:.3e}", dzb_k.sup);
    // b = 1, p = z + 1: the defect is |conj(b) P_z| = 1 everywhere.
    assert!((minim.sup - 1.0).abs() <= 1e-12, "minimality = {}", minim.sup);
}

#[test]
fn catalog_rejects_unknown_names_and_bad_parameters() {
    assert!(matches!(
        catalog("frobnicated"),
        Err(SurfaceError::UnknownCatalog { .. })
    ));
    assert!(matches!(
        entries::const_demoulin(0.0, 0.05),
        Err(SurfaceError::BadParameter { .. })
    ));
    assert!(matches!(
        entries::coincidence_minimal(1.0, 0.0, 0.05),
        Err(SurfaceError::BadParameter { .. })
    ));
    assert!(matches!(
        entries::nonminimal_linear(0.0, 1.0, 0.05),
        Err(SurfaceError::BadParameter { .. })
    ));
}

#[test]
fn sup_argmax_reports_the_first_maximum_in_storage_order() {
    let spec = GridSpec::new(
        Rect {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        },
        0.5,
    )
    .unwrap();
    let grid = Grid::from_fn(spec.nx, spec.ny, |i, j| if i + j >= 2 { 7.0 } else { 0.0 });
    let (sup, argmax) = grid.sup_argmax(&spec);
    assert_eq!(sup, 7.0);
    // (2, 0) comes before (1, 1) and (0, 2) in storage order.
    assert_eq!(argmax, (1.0, 0.0));
}

#[test]
fn expression_data_round_trips_through_the_constructor() {
    // Mixed data with an explicit base away from the origin.
    let rect = Rect {
        x0: 1.0,
        x1: 2.0,
        y0: -0.5,
        y1: 0.5,
    };
    let b = Expr::one().add(&Expr::z().mul(&Expr::zb()).pow(2));
    let sd = SurfaceData::new(rect, 0.25, (1.5, 0.0), b, Expr::zero()).unwrap();
    assert_eq!(sd.base, (2, 2));
    assert!(sd.min_abs_b >= 1.0);
}
