//! Tree-walking evaluator.
//!
//! Evaluation is exact arithmetic over `Complex64` with two guarded
//! operations: division (and negative powers, which are division in disguise)
//! by a value of modulus below `1e-300` is an error, as is the logarithm of
//! such a value. `log` takes the principal branch, with the argument in
//! `(-π, π]`, so `log(-1) = iπ`.

use num_complex::Complex64;

use crate::ast::{Expr, Node};

/// Modulus below which a divisor or logarithm argument counts as zero.
/// `1e-300` sits far under any value a well-posed coefficient field can
/// produce while still catching genuine poles before they turn into `inf`.
pub const POLE_FLOOR: f64 = 1e-300;

/// An evaluation failure, tagged with the point at which it occurred.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    /// A division whose divisor had modulus below [`POLE_FLOOR`].
    #[error("division by (numerical) zero at z = {z}, zb = {zb}")]
    DivisionByZero { z: Complex64, zb: Complex64 },
    /// A logarithm whose argument had modulus below [`POLE_FLOOR`].
    #[error("logarithm of (numerical) zero at z = {z}, zb = {zb}")]
    LogOfZero { z: Complex64, zb: Complex64 },
}

impl Expr {
    /// Evaluate with independent values for `z` and `zb`.
    ///
    /// Most callers want [`Expr::eval`], which binds `zb = conj(z)`; this
    /// variant exists so the symbolic layer can be exercised off the slice.
    pub fn eval_at(&self, z: Complex64, zb: Complex64) -> Result<Complex64, EvalError> {
        match self.node() {
            Node::Const(c) => Ok(*c),
            Node::Z => Ok(z),
            Node::Zb => Ok(zb),
            Node::Neg(e) => Ok(-e.eval_at(z, zb)?),
            Node::Conj(e) => Ok(e.eval_at(z, zb)?.conj()),
            Node::Exp(e) => Ok(e.eval_at(z, zb)?.exp()),
            Node::Log(e) => {
                let v = e.eval_at(z, zb)?;
                if v.norm() < POLE_FLOOR {
                    return Err(EvalError::LogOfZero { z, zb });
                }
                Ok(v.ln())
            }
            Node::Add(a, b) => Ok(a.eval_at(z, zb)? + b.eval_at(z, zb)?),
            Node::Sub(a, b) => Ok(a.eval_at(z, zb)? - b.eval_at(z, zb)?),
            Node::Mul(a, b) => Ok(a.eval_at(z, zb)? * b.eval_at(z, zb)?),
            Node::Div(a, b) => {
                let num = a.eval_at(z, zb)?;
                let den = b.eval_at(z, zb)?;
                if den.norm() < POLE_FLOOR {
                    return Err(EvalError::DivisionByZero { z, zb });
                }
                Ok(num / den)
            }
            Node::Pow(e, n) => {
                let base = e.eval_at(z, zb)?;
                let m = base.powu(n.unsigned_abs());
                if *n >= 0 {
                    Ok(m)
                } else {
                    if m.norm() < POLE_FLOOR {
                        return Err(EvalError::DivisionByZero { z, zb });
                    }
                    Ok(m.finv())
                }
            }
        }
    }

    /// Evaluate on the slice `zb = conj(z)`, where all field data lives.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.eval_at(z, z.conj())
    }
}

/// Constant folding helper for integer powers: mirrors the evaluator's
/// semantics without the pole error (the caller checks finiteness instead).
pub(crate) fn const_powi(c: Complex64, n: i32) -> Complex64 {
    let m = c.powu(n.unsigned_abs());
    if n >= 0 {
        m
    } else {
        m.finv()
    }
}
