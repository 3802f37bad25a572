//! Stable text formatting for reports: every float is printed with 17
//! significant digits so the files round-trip losslessly and re-runs are
//! byte-identical.

use num_complex::Complex64;

/// A real number with 17 significant digits, e.g. `5.0000000000000000e-2`.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// A complex number as `re+imi` with both parts in [`fmt_f`] form and an
/// explicit sign on the imaginary part, e.g.
/// `1.0000000000000000e0-2.5000000000000000e-1i`.
pub fn fmt_c(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}
