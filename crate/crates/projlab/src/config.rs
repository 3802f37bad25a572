//! Run configuration: a flat `key = value` text file (no sections, no
//! nesting), a handful of command-line overrides, and the resolution step
//! that turns both into validated surface data.
//!
//! # Format
//!
//! ```text
//! # comments and blank lines are skipped
//! catalog = liouville_demoulin     # or: b = "exp(z*zb)" and p = "0"
//! step = 0.05
//! tol = 1e-8
//! ```
//!
//! Values are single tokens, or double-quoted strings for anything with
//! spaces (coefficient expressions in particular; no escape sequences).
//! A `#` outside quotes starts a comment. Keys may appear once; unknown
//! keys are errors so typos cannot silently change a run.
//!
//! # Keys
//!
//! | key                  | meaning                                      | default |
//! |----------------------|----------------------------------------------|---------|
//! | `catalog`            | built-in data set name                       | —       |
//! | `b`, `p`             | coefficient expressions in `z`, `zb`         | `p`: `"0"` |
//! | `x0` `x1` `y0` `y1`  | domain rectangle (expression sources only)   | unit square |
//! | `step`               | grid step                                    | `0.05` |
//! | `base_x`, `base_y`   | integration base point (expression sources)  | `(x0, y0)` |
//! | `tol`                | residual tolerance                           | `1e-8` |
//! | `split`              | `first-order` or `conformal`                 | `first-order` |
//! | `which`              | quadric map, `first` or `second`             | `first` |
//! | `richardson`         | fourth-order differences, `true`/`false`     | `false` |
//! | `substeps`           | RK4 substeps per grid cell                   | `12`   |
//! | `lambda_samples`     | circle sample count (at least 4)             | `15`   |
//! | `out`                | output directory                             | `.`    |
//! | `expect_class`       | claimed class for `loop-check`               | —      |
//!
//! A `catalog` source fixes its own domain and base point, so the rectangle
//! and base keys conflict with it; `step` applies to both source kinds.
//! `expect_class` takes `demoulin`, `projective-minimal`, `generic`, with an
//! optional `+coincidence` suffix.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use projframe::frame::DEFAULT_SUBSTEPS;
use projframe::quadric::GaussMap;
use projframe::spectral::{self, SplitType};
use projframe::surface::{catalog, Rect, SurfaceClass, SurfaceData, DEFAULT_STEP, DEFAULT_TOL};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Default total circle sample count: twelve equally spaced plus the three
/// pinned pseudo-random samples.
pub const DEFAULT_LAMBDA_SAMPLES: usize = 15;

/// Every key the config file accepts.
pub const KEYS: [&str; 18] = [
    "catalog",
    "b",
    "p",
    "x0",
    "x1",
    "y0",
    "y1",
    "step",
    "base_x",
    "base_y",
    "tol",
    "split",
    "which",
    "richardson",
    "substeps",
    "lambda_samples",
    "out",
    "expect_class",
];

/// Where the coefficient data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// A built-in data set by name.
    Catalog(String),
    /// Coefficient expressions, kept as the original source strings so the
    /// canonical serialization reproduces the config exactly.
    Exprs { b: String, p: String },
}

/// A fully resolved run configuration. Geometry fields are `None` for
/// catalog sources (the entry fixes its own domain and base point).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub rect: Option<Rect>,
    pub base: Option<(f64, f64)>,
    pub step: Option<f64>,
    pub tol: f64,
    pub split: SplitType,
    pub which: GaussMap,
    pub richardson: bool,
    pub substeps: usize,
    /// Total circle sample count (the last three are the pinned
    /// pseudo-random samples, so this is at least 4).
    pub lambda_samples: usize,
    pub out: PathBuf,
    /// Claimed classification for `loop-check`: class plus coincidence flag.
    pub expect_class: Option<(SurfaceClass, bool)>,
}

/// Parse the config text into a key/value map, rejecting unknown keys,
/// duplicates and malformed lines.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {n}: expected `key = value`")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {n}: unknown key `{key}`")));
        }
        let value = parse_value(rest.trim(), n)?;
        if map.insert(key.to_string(), value).is_some() {
            return Err(CliError::Config(format!("line {n}: duplicate key `{key}`")));
        }
    }
    Ok(map)
}

/// One value: a double-quoted string (no escapes) or a bare token with an
/// optional trailing comment.
fn parse_value(s: &str, n: usize) -> Result<String, CliError> {
    if let Some(rest) = s.strip_prefix('"') {
        let end = rest
            .find('"')
            .ok_or_else(|| CliError::Config(format!("line {n}: unterminated quote")))?;
        let tail = rest[end + 1..].trim();
        if !(tail.is_empty() || tail.starts_with('#')) {
            return Err(CliError::Config(format!(
                "line {n}: unexpected text after closing quote"
            )));
        }
        Ok(rest[..end].to_string())
    } else {
        let cut = s.find('#').map_or(s, |i| &s[..i]).trim();
        if cut.is_empty() {
            return Err(CliError::Config(format!("line {n}: empty value")));
        }
        if cut.split_whitespace().count() != 1 {
            return Err(CliError::Config(format!(
                "line {n}: unquoted value `{cut}` contains spaces (quote it)"
            )));
        }
        Ok(cut.to_string())
    }
}

/// Fold command-line flags into the key/value map (flags win over the file).
pub fn apply_flags(map: &mut BTreeMap<String, String>, flags: &[String]) -> Result<(), CliError> {
    let mut it = flags.iter();
    while let Some(flag) = it.next() {
        let key = match flag.as_str() {
            "--tol" => "tol",
            "--step" => "step",
            "--lambda-samples" => "lambda_samples",
            "--out" => "out",
            other => return Err(CliError::Usage(format!("unknown flag `{other}`"))),
        };
        let value = it
            .next()
            .ok_or_else(|| CliError::Usage(format!("flag `{flag}` needs a value")))?;
        map.insert(key.to_string(), value.clone());
    }
    Ok(())
}

fn parse_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(CliError::Config(format!(
                "key `{key}`: `{v}` is not a finite number"
            ))),
        },
    }
}

fn parse_usize(map: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse::<usize>().map(Some).map_err(|_| {
            CliError::Config(format!("key `{key}`: `{v}` is not a non-negative integer"))
        }),
    }
}

fn parse_class(s: &str) -> Result<(SurfaceClass, bool), CliError> {
    let (name, coincidence) = match s.strip_suffix("+coincidence") {
        Some(base) => (base, true),
        None => (s, false),
    };
    let class = match name {
        "demoulin" => SurfaceClass::Demoulin,
        "projective-minimal" => SurfaceClass::ProjectiveMinimal,
        "generic" => SurfaceClass::Generic,
        _ => {
            return Err(CliError::Config(format!(
                "key `expect_class`: `{s}` is not demoulin | projective-minimal | generic \
                 (optionally with `+coincidence`)"
            )))
        }
    };
    Ok((class, coincidence))
}

/// Resolve the key/value map into a validated [`RunConfig`].
pub fn resolve(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let source = match (map.get("catalog"), map.get("b")) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either `catalog` or a `b` expression, not both".into(),
            ))
        }
        (Some(name), None) => {
            for key in ["p", "x0", "x1", "y0", "y1", "base_x", "base_y"] {
                if map.contains_key(key) {
                    return Err(CliError::Config(format!(
                        "key `{key}` conflicts with `catalog` (the entry fixes its own data \
                         and domain)"
                    )));
                }
            }
            Source::Catalog(name.clone())
        }
        (None, Some(b)) => Source::Exprs {
            b: b.clone(),
            p: map.get("p").cloned().unwrap_or_else(|| "0".to_string()),
        },
        (None, None) => {
            return Err(CliError::Config(
                "missing surface source: set `catalog = <name>` or a quoted `b = \"...\"` \
                 expression"
                    .into(),
            ))
        }
    };

    let (rect, base) = match &source {
        Source::Catalog(_) => (None, None),
        Source::Exprs { .. } => {
            let x0 = parse_f64(map, "x0")?.unwrap_or(0.0);
            let x1 = parse_f64(map, "x1")?.unwrap_or(1.0);
            let y0 = parse_f64(map, "y0")?.unwrap_or(0.0);
            let y1 = parse_f64(map, "y1")?.unwrap_or(1.0);
            let base_x = parse_f64(map, "base_x")?.unwrap_or(x0);
            let base_y = parse_f64(map, "base_y")?.unwrap_or(y0);
            (Some(Rect { x0, x1, y0, y1 }), Some((base_x, base_y)))
        }
    };

    let tol = parse_f64(map, "tol")?.unwrap_or(DEFAULT_TOL);
    if tol <= 0.0 {
        return Err(CliError::Config(format!("key `tol`: {tol} must be positive")));
    }
    let step = parse_f64(map, "step")?;

    let split = match map.get("split").map(String::as_str) {
        None | Some("first-order") => SplitType::FirstOrder,
        Some("conformal") => SplitType::Conformal,
        Some(v) => {
            return Err(CliError::Config(format!(
                "key `split`: `{v}` is not first-order | conformal"
            )))
        }
    };
    let which = match map.get("which").map(String::as_str) {
        None | Some("first") => GaussMap::First,
        Some("second") => GaussMap::Second,
        Some(v) => {
            return Err(CliError::Config(format!(
                "key `which`: `{v}` is not first | second"
            )))
        }
    };
    let richardson = match map.get("richardson").map(String::as_str) {
        None | Some("false") => false,
        Some("true") => true,
        Some(v) => {
            return Err(CliError::Config(format!(
                "key `richardson`: `{v}` is not true | false"
            )))
        }
    };

    let substeps = parse_usize(map, "substeps")?.unwrap_or(DEFAULT_SUBSTEPS);
    if substeps == 0 {
        return Err(CliError::Config("key `substeps`: must be at least 1".into()));
    }
    let lambda_samples = parse_usize(map, "lambda_samples")?.unwrap_or(DEFAULT_LAMBDA_SAMPLES);
    if lambda_samples < 4 {
        return Err(CliError::Config(
            "key `lambda_samples`: must be at least 4 (three pinned pseudo-random samples \
             are always included)"
                .into(),
        ));
    }

    let out = PathBuf::from(map.get("out").map_or(".", String::as_str));
    let expect_class = match map.get("expect_class") {
        None => None,
        Some(v) => Some(parse_class(v)?),
    };

    Ok(RunConfig {
        source,
        rect,
        base,
        step,
        tol,
        split,
        which,
        richardson,
        substeps,
        lambda_samples,
        out,
        expect_class,
    })
}

/// The quadric-map key value for the canonical serialization.
fn which_name(which: GaussMap) -> &'static str {
    match which {
        GaussMap::First => "first",
        GaussMap::Second => "second",
    }
}

impl RunConfig {
    /// Build (and thereby validate) the surface data this config describes.
    pub fn build_surface(&self) -> Result<SurfaceData, CliError> {
        match &self.source {
            Source::Catalog(name) => {
                let sd = catalog(name)?;
                match self.step {
                    Some(h) => Ok(sd.with_step(h)?),
                    None => Ok(sd),
                }
            }
            Source::Exprs { b, p } => {
                let rect = self.rect.expect("resolved for expression sources");
                let base = self.base.expect("resolved for expression sources");
                let b = wirtexpr::parse(b)?;
                let p = wirtexpr::parse(p)?;
                Ok(SurfaceData::new(
                    rect,
                    self.step.unwrap_or(DEFAULT_STEP),
                    base,
                    b,
                    p,
                )?)
            }
        }
    }

    /// The circle samples this config asks for: `lambda_samples - 3` equally
    /// spaced roots of unity plus the three pinned pseudo-random samples.
    pub fn lambda_set(&self) -> Vec<Complex64> {
        spectral::lambda_samples(self.lambda_samples - 3)
    }

    /// The effective configuration as a canonical text block: fixed key
    /// order, resolved geometry taken from the built surface data, every
    /// float with 17 significant digits. The output directory is excluded —
    /// it does not change what was computed.
    pub fn canonical_string(&self, sd: &SurfaceData) -> String {
        use crate::output::fmt_f;
        let mut s = String::new();
        match &self.source {
            Source::Catalog(name) => s.push_str(&format!("catalog = {name}\n")),
            Source::Exprs { b, p } => {
                s.push_str(&format!("b = \"{b}\"\n"));
                s.push_str(&format!("p = \"{p}\"\n"));
            }
        }
        let r = sd.grid.rect;
        for (key, value) in [("x0", r.x0), ("x1", r.x1), ("y0", r.y0), ("y1", r.y1)] {
            s.push_str(&format!("{key} = {}\n", fmt_f(value)));
        }
        s.push_str(&format!("step = {}\n", fmt_f(sd.grid.h)));
        s.push_str(&format!("base_x = {}\n", fmt_f(sd.grid.x_at(sd.base.0))));
        s.push_str(&format!("base_y = {}\n", fmt_f(sd.grid.y_at(sd.base.1))));
        s.push_str(&format!("tol = {}\n", fmt_f(self.tol)));
        s.push_str(&format!("split = {}\n", self.split));
        s.push_str(&format!("which = {}\n", which_name(self.which)));
        s.push_str(&format!("richardson = {}\n", self.richardson));
        s.push_str(&format!("substeps = {}\n", self.substeps));
        s.push_str(&format!("lambda_samples = {}\n", self.lambda_samples));
        s
    }

    /// SHA-256 of [`RunConfig::canonical_string`], lowercase hex.
    pub fn hash(&self, sd: &SurfaceData) -> String {
        let digest = Sha256::digest(self.canonical_string(sd).as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}
