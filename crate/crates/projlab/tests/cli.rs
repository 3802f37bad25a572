//! Binary-level behavior: exit codes, file shapes, and byte-for-byte
//! determinism of the reports.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn cfg(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).expect("config written");
}

#[test]
fn usage_problems_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    cfg(dir, "ok.cfg", "catalog = const_demoulin\n");

    let out = run_in(dir, &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("usage:"));

    let out = run_in(dir, &["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("usage:"));

    for bad in [
        vec!["frobnicate", "ok.cfg"],
        vec!["validate"],
        vec!["validate", "no_such_file.cfg"],
        vec!["validate", "ok.cfg", "--frobnicate", "1"],
        vec!["validate", "ok.cfg", "--tol"],
    ] {
        let out = run_in(dir, &bad);
        assert_eq!(code(&out), 2, "{bad:?}: {}", stderr(&out));
    }

    cfg(dir, "unknown_key.cfg", "catalog = const_demoulin\ncolour = blue\n");
    cfg(dir, "unknown_catalog.cfg", "catalog = moebius\n");
    for name in ["unknown_key.cfg", "unknown_catalog.cfg"] {
        let out = run_in(dir, &["validate", name]);
        assert_eq!(code(&out), 2, "{name}: {}", stderr(&out));
    }
}

#[test]
fn validate_follows_the_exit_code_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    cfg(dir, "liou.cfg", "catalog = liouville_demoulin\n");
    let out = run_in(dir, &["validate", "liou.cfg", "--out", "liou"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("validation: PASS"));
    let csv = fs::read_to_string(dir.join("liou/residuals.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "name,sup_norm,argmax_x,argmax_y");
    assert_eq!(lines.len(), 7);
    for (line, name) in lines[1..]
        .iter()
        .zip(["comp1", "comp2", "projmin", "demoulin", "canon1", "canon2"])
    {
        assert!(line.starts_with(&format!("{name},")), "{line}");
    }

    // Consistent coefficients that do not close up into a surface.
    cfg(dir, "broken.cfg", "b = \"1\"\np = \"zb\"\n");
    let out = run_in(dir, &["validate", "broken.cfg", "--out", "broken"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("validation: FAIL"));
    let csv = fs::read_to_string(dir.join("broken/residuals.csv")).unwrap();
    assert!(
        csv.contains("canon1,1.0000000000000000e0,"),
        "canon1 should sit at exactly one:\n{csv}"
    );

    cfg(dir, "nob.cfg", "p = \"zb\"\n");
    let out = run_in(dir, &["validate", "nob.cfg"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("missing surface source"));

    // A pole on the grid is a data problem, not a config problem.
    cfg(dir, "pole.cfg", "b = \"1/z\"\n");
    let out = run_in(dir, &["validate", "pole.cfg"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("invalid data"));

    // Tolerance flag flows through: rounding-level residuals fail a 1e-15 gate.
    let out = run_in(dir, &["validate", "liou.cfg", "--tol", "1e-15", "--out", "strict"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("validation: FAIL"));
}

#[test]
fn classify_prints_the_catalog_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (name, class, coincidence) in [
        ("const_demoulin", "Demoulin", false),
        ("liouville_demoulin", "Demoulin", false),
        ("coincidence_minimal", "ProjectiveMinimal", true),
        ("nonminimal_linear", "Generic", false),
    ] {
        cfg(dir, "c.cfg", &format!("catalog = {name}\n"));
        let out = run_in(dir, &["classify", "c.cfg"]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains(&format!("class: {class}")), "{name}:\n{text}");
        assert!(
            text.contains(&format!("coincidence: {coincidence}")),
            "{name}:\n{text}"
        );
        assert_eq!(text.matches("\nzcr ").count(), 3, "{name}:\n{text}");
    }
}

#[test]
fn loop_check_exit_codes_track_consistency() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    cfg(dir, "liou.cfg", "catalog = liouville_demoulin\n");
    let out = run_in(dir, &["loop-check", "liou.cfg", "--out", "a"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("loop check: CONSISTENT"));
    assert!(text.contains("twist at lambda"));
    assert!(text.contains("primitivity = "));
    let csv = fs::read_to_string(dir.join("a/flatness.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16); // header + 15 samples
    assert_eq!(
        csv.lines().next().unwrap(),
        "lambda_re,lambda_im,sup_residual,argmax_x,argmax_y"
    );

    cfg(dir, "gen.cfg", "catalog = nonminimal_linear\n");
    let out = run_in(dir, &["loop-check", "gen.cfg", "--out", "b"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("correctly non-flat"));
    assert!(!text.contains("twist at lambda"));

    // A claimed class that contradicts the measured flatness fails the run.
    cfg(
        dir,
        "lie.cfg",
        "catalog = nonminimal_linear\nexpect_class = demoulin\n",
    );
    let out = run_in(dir, &["loop-check", "lie.cfg", "--out", "c"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("loop check: INCONSISTENT"));

    cfg(
        dir,
        "lie2.cfg",
        "catalog = liouville_demoulin\nexpect_class = generic\n",
    );
    let out = run_in(dir, &["loop-check", "lie2.cfg", "--out", "d"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("loop check: INCONSISTENT"));

    // The conformal family is flat exactly on projective-minimal data.
    cfg(
        dir,
        "coin.cfg",
        "catalog = coincidence_minimal\nsplit = conformal\n",
    );
    let out = run_in(dir, &["loop-check", "coin.cfg", "--out", "e"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("flat family, as the class predicts"));

    cfg(
        dir,
        "gen2.cfg",
        "catalog = nonminimal_linear\nsplit = conformal\n",
    );
    let out = run_in(dir, &["loop-check", "gen2.cfg", "--out", "f"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("correctly non-flat"));
}

#[test]
fn gauss_reports_have_stable_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    cfg(dir, "c.cfg", "catalog = const_demoulin\n");
    let out = run_in(dir, &["gauss", "c.cfg", "--out", "g"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("map: first, scheme: central-2"));
    assert!(text.contains("sup |fd - closed| zz  = "));

    let quadrics = fs::read_to_string(dir.join("g/quadrics.csv")).unwrap();
    let lines: Vec<&str> = quadrics.lines().collect();
    assert_eq!(
        lines[0],
        "x,y,q00,q01,q02,q03,q10,q11,q12,q13,q20,q21,q22,q23,q30,q31,q32,q33"
    );
    assert_eq!(lines.len(), 1 + 21 * 21);

    let conf = fs::read_to_string(dir.join("g/conformality.csv")).unwrap();
    let lines: Vec<&str> = conf.lines().collect();
    assert_eq!(
        lines[0],
        "x,y,fd_value_zz,closed_form_zz,fd_value_zzb,closed_form_zzb"
    );
    assert_eq!(lines.len(), 1 + 19 * 19); // one-ring interior of 21 x 21

    // The wider fourth-order stencil needs a two-ring margin.
    cfg(
        dir,
        "r.cfg",
        "catalog = const_demoulin\nrichardson = true\nwhich = second\n",
    );
    let out = run_in(dir, &["gauss", "r.cfg", "--out", "r"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("map: second, scheme: richardson-4"));
    let conf = fs::read_to_string(dir.join("r/conformality.csv")).unwrap();
    assert_eq!(conf.lines().count(), 1 + 17 * 17);
}

#[test]
fn mesh_export_is_deterministic_and_counts_match() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    cfg(dir, "c.cfg", "catalog = const_demoulin\n");

    let out = run_in(dir, &["export-mesh", "c.cfg", "--out", "m1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("(441 vertices, 400 faces)"));

    let obj = fs::read_to_string(dir.join("m1/mesh.obj")).unwrap();
    let lines: Vec<&str> = obj.lines().collect();
    assert!(lines[1].starts_with("# config sha256: "));
    assert_eq!(lines[1].len(), "# config sha256: ".len() + 64);
    assert_eq!(lines.iter().filter(|l| l.starts_with("v ")).count(), 441);
    assert_eq!(lines.iter().filter(|l| l.starts_with("f ")).count(), 400);
    // The base node integrates to the identity frame, which lifts to the
    // chart origin — and it is the first vertex in row-major order.
    assert_eq!(
        lines[2],
        "v 0.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0"
    );

    let out = run_in(dir, &["export-mesh", "c.cfg", "--out", "m2"]);
    assert_eq!(code(&out), 0);
    let again = fs::read_to_string(dir.join("m2/mesh.obj")).unwrap();
    assert_eq!(obj, again, "re-export must be byte-identical");

    // A different effective config gets a different hash and grid.
    let out = run_in(dir, &["export-mesh", "c.cfg", "--step", "0.1", "--out", "m3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("(121 vertices, 100 faces)"));
    let coarse = fs::read_to_string(dir.join("m3/mesh.obj")).unwrap();
    assert_ne!(
        obj.lines().nth(1).unwrap(),
        coarse.lines().nth(1).unwrap(),
        "config hash must change with the step"
    );
}

#[test]
fn stdout_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    cfg(dir, "c.cfg", "catalog = liouville_demoulin\n");
    let first = run_in(dir, &["validate", "c.cfg", "--out", "x"]);
    let second = run_in(dir, &["validate", "c.cfg", "--out", "x"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}
