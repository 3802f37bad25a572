//! Subcommand dispatch and the five pipelines: `validate`, `classify`,
//! `gauss`, `loop-check` and `export-mesh`. Each returns the process exit
//! code on a completed run and [`CliError`] when the run cannot start.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use projframe::frame::{integrate_frame, realify, surface_lift, Sweep};
use projframe::quadric::{conformality_report, gauss_map, FdScheme};
use projframe::spectral::{
    flatness_residual, primitivity_residual, twist_residual, SplitType, FLATNESS_GATE,
};
use projframe::surface::{classify, derive_kp, residual_report, SurfaceClass};

use crate::config::{self, RunConfig};
use crate::mesh::obj_string;
use crate::output::{fmt_c, fmt_f};
use crate::CliError;

pub const USAGE: &str = "\
usage: projlab <command> <config.cfg> [--tol X] [--step H] [--lambda-samples N] [--out DIR]

commands:
  validate      write residuals.csv; exit 0 iff the surface-validity residuals pass
  classify      print the class, the coincidence flag and the first-order ZCR sups
  gauss         write quadrics.csv and conformality.csv for the configured map
  loop-check    write flatness.csv; exit 0 iff flatness matches the classification
  export-mesh   write mesh.obj (surface lift; the header records the config hash)

Flags override the matching config keys. See the config documentation for the
full key list and the file format.";

/// Residuals that gate `validate` (the classification diagnostics
/// `projmin`/`demoulin` are reported but never gated).
const VALIDITY_GATES: [&str; 4] = ["comp1", "comp2", "canon1", "canon2"];

/// Dispatch a full command line (without the program name).
pub fn run(args: &[String]) -> Result<u8, CliError> {
    let Some(first) = args.first() else {
        return Err(CliError::Usage(USAGE.to_string()));
    };
    if matches!(first.as_str(), "-h" | "--help" | "help") {
        println!("{USAGE}");
        return Ok(0);
    }
    let command = first.as_str();
    if !["validate", "classify", "gauss", "loop-check", "export-mesh"].contains(&command) {
        return Err(CliError::Usage(format!(
            "unknown command `{command}`\n\n{USAGE}"
        )));
    }
    let path = args
        .get(1)
        .filter(|a| !a.starts_with("--"))
        .ok_or_else(|| {
            CliError::Usage(format!("command `{command}` needs a config file\n\n{USAGE}"))
        })?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read `{path}`: {e}")))?;
    let mut map = config::parse_config(&text)?;
    config::apply_flags(&mut map, &args[2..])?;
    let cfg = config::resolve(&map)?;
    match command {
        "validate" => cmd_validate(&cfg),
        "classify" => cmd_classify(&cfg),
        "gauss" => cmd_gauss(&cfg),
        "loop-check" => cmd_loop_check(&cfg),
        "export-mesh" => cmd_export_mesh(&cfg),
        _ => unreachable!("commands filtered above"),
    }
}

fn write_report(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn class_label((class, coincidence): (SurfaceClass, bool)) -> String {
    if coincidence {
        format!("{class} (coincidence)")
    } else {
        class.to_string()
    }
}

/// Compute the six canonical residuals, write `residuals.csv`, and gate the
/// validity ones against the tolerance.
fn cmd_validate(cfg: &RunConfig) -> Result<u8, CliError> {
    let sd = cfg.build_surface()?;
    let dd = derive_kp(&sd);
    let rep = residual_report(&sd, &dd)?;

    let mut csv = String::from("name,sup_norm,argmax_x,argmax_y\n");
    for e in &rep.entries {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            e.name,
            fmt_f(e.sup),
            fmt_f(e.argmax.0),
            fmt_f(e.argmax.1)
        ));
        println!(
            "{:<8} sup = {} at ({}, {})",
            e.name,
            fmt_f(e.sup),
            fmt_f(e.argmax.0),
            fmt_f(e.argmax.1)
        );
    }
    let path = write_report(&cfg.out, "residuals.csv", &csv)?;
    println!("wrote {}", path.display());

    let worst = VALIDITY_GATES
        .iter()
        .map(|name| rep.sup(name).unwrap_or(f64::INFINITY))
        .fold(0.0_f64, f64::max);
    if worst <= cfg.tol {
        println!(
            "validation: PASS (worst gated residual {} <= tol {})",
            fmt_f(worst),
            fmt_f(cfg.tol)
        );
        Ok(0)
    } else {
        println!(
            "validation: FAIL (worst gated residual {} > tol {})",
            fmt_f(worst),
            fmt_f(cfg.tol)
        );
        Ok(1)
    }
}

/// Print the classification and the first-order zero-curvature sup-norms.
fn cmd_classify(cfg: &RunConfig) -> Result<u8, CliError> {
    let sd = cfg.build_surface()?;
    let cls = classify(&sd, cfg.tol)?;
    println!("class: {}", cls.class);
    println!("coincidence: {}", cls.coincidence);
    for e in &cls.zcr_first_order {
        println!(
            "zcr {:<10} sup = {} at ({}, {})",
            e.name,
            fmt_f(e.sup),
            fmt_f(e.argmax.0),
            fmt_f(e.argmax.1)
        );
    }
    Ok(0)
}

/// Integrate the frame, map it to the configured quadric congruence, and
/// write the grid plus the finite-difference conformality comparison.
fn cmd_gauss(cfg: &RunConfig) -> Result<u8, CliError> {
    let sd = cfg.build_surface()?;
    let dd = derive_kp(&sd);
    let ff = integrate_frame(&sd, &dd, Sweep::XThenY, cfg.substeps)?;
    let qf = gauss_map(&ff, cfg.which)?;
    let scheme = if cfg.richardson {
        FdScheme::Richardson4
    } else {
        FdScheme::Central2
    };
    let rep = conformality_report(&sd, &dd, &ff, &qf, scheme)?;

    let mut quadrics = String::from(
        "x,y,q00,q01,q02,q03,q10,q11,q12,q13,q20,q21,q22,q23,q30,q31,q32,q33\n",
    );
    for (i, j, pt) in qf.points.iter() {
        quadrics.push_str(&fmt_f(qf.spec.x_at(i)));
        quadrics.push(',');
        quadrics.push_str(&fmt_f(qf.spec.y_at(j)));
        for row in &pt.q {
            for &entry in row {
                quadrics.push(',');
                quadrics.push_str(&fmt_f(entry));
            }
        }
        quadrics.push('\n');
    }

    let mut conf = String::from("x,y,fd_value_zz,closed_form_zz,fd_value_zzb,closed_form_zzb\n");
    for row in &rep.rows {
        conf.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(row.node.0),
            fmt_f(row.node.1),
            fmt_c(row.fd_zz),
            fmt_c(row.closed_zz),
            fmt_c(row.fd_zzb),
            fmt_c(row.closed_zzb)
        ));
    }

    println!(
        "map: {}, scheme: {}",
        match cfg.which {
            projframe::quadric::GaussMap::First => "first",
            projframe::quadric::GaussMap::Second => "second",
        },
        match scheme {
            FdScheme::Central2 => "central-2",
            FdScheme::Richardson4 => "richardson-4",
        }
    );
    println!("sup |fd - closed| zz  = {}", fmt_f(rep.sup_zz));
    println!("sup |fd - closed| zzb = {}", fmt_f(rep.sup_zzb));
    let qpath = write_report(&cfg.out, "quadrics.csv", &quadrics)?;
    println!("wrote {}", qpath.display());
    let cpath = write_report(&cfg.out, "conformality.csv", &conf)?;
    println!("wrote {}", cpath.display());
    Ok(0)
}

/// Measure flatness of the configured loop family over the circle samples
/// and check the verdict against the (computed or claimed) classification.
fn cmd_loop_check(cfg: &RunConfig) -> Result<u8, CliError> {
    let sd = cfg.build_surface()?;
    let dd = derive_kp(&sd);
    let cls = classify(&sd, cfg.tol)?;
    let computed = (cls.class, cls.coincidence);
    println!("class: {}", class_label(computed));
    let claimed = match cfg.expect_class {
        Some(claim) => {
            println!("claimed: {}", class_label(claim));
            claim
        }
        None => computed,
    };
    println!("split: {}", cfg.split);

    let samples = cfg.lambda_set();
    let flats = flatness_residual(&sd, &dd, cfg.split, &samples)?;
    let mut csv = String::from("lambda_re,lambda_im,sup_residual,argmax_x,argmax_y\n");
    let mut worst: f64 = 0.0;
    for lf in &flats {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f(lf.lambda.re),
            fmt_f(lf.lambda.im),
            fmt_f(lf.sup),
            fmt_f(lf.argmax.0),
            fmt_f(lf.argmax.1)
        ));
        println!(
            "lambda = {}  sup = {} at ({}, {})",
            fmt_c(lf.lambda),
            fmt_f(lf.sup),
            fmt_f(lf.argmax.0),
            fmt_f(lf.argmax.1)
        );
        worst = worst.max(lf.sup);
    }
    let flat = worst <= FLATNESS_GATE;
    println!(
        "flatness: {} (worst {}, gate {})",
        if flat { "flat" } else { "not flat" },
        fmt_f(worst),
        fmt_f(FLATNESS_GATE)
    );

    // The frame-level symmetries only exist once the family actually
    // integrates, i.e. on flat first-order families.
    if cfg.split == SplitType::FirstOrder && flat {
        let lambda = Complex64::from_polar(1.0, std::f64::consts::PI / 11.0);
        let tw = twist_residual(&sd, &dd, lambda, Sweep::XThenY, cfg.substeps)?;
        println!(
            "twist at lambda = {}: sigma = {}  kappa = {}  tau1 = {}",
            fmt_c(lambda),
            fmt_f(tw.sigma),
            fmt_f(tw.kappa),
            fmt_f(tw.tau1)
        );
        let prim = primitivity_residual(&sd, &dd)?;
        println!("primitivity = {}", fmt_f(prim));
    }

    let path = write_report(&cfg.out, "flatness.csv", &csv)?;
    println!("wrote {}", path.display());

    let predicted = match cfg.split {
        SplitType::FirstOrder => claimed.0 == SurfaceClass::Demoulin || claimed.1,
        SplitType::Conformal => claimed.0 != SurfaceClass::Generic,
    };
    if flat == predicted {
        println!(
            "loop check: CONSISTENT — {}",
            if flat {
                "flat family, as the class predicts"
            } else {
                "correctly non-flat"
            }
        );
        Ok(0)
    } else {
        println!(
            "loop check: INCONSISTENT — measured {} but the class predicts {}",
            if flat { "flat" } else { "not flat" },
            if predicted { "flat" } else { "not flat" }
        );
        Ok(1)
    }
}

/// Integrate the frame, realify, lift, and export the chart-valid nodes as
/// an OBJ quad mesh stamped with the config hash.
fn cmd_export_mesh(cfg: &RunConfig) -> Result<u8, CliError> {
    let sd = cfg.build_surface()?;
    let dd = derive_kp(&sd);
    let ff = integrate_frame(&sd, &dd, Sweep::XThenY, cfg.substeps)?;
    let rf = realify(&ff);
    let lift = surface_lift(&rf);
    let (obj, stats) = obj_string(&lift, &cfg.hash(&sd));
    let path = write_report(&cfg.out, "mesh.obj", &obj)?;
    println!(
        "wrote {} ({} vertices, {} faces)",
        path.display(),
        stats.vertices,
        stats.faces
    );
    Ok(0)
}
