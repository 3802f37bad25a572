//! Structural properties of the AST under printing and parsing, checked over
//! randomly generated constructor-built trees.

use num_complex::Complex64;
use proptest::prelude::*;
use wirtexpr::{parse, Expr};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::z()),
        Just(Expr::zb()),
        Just(Expr::constant(Complex64::new(0.0, 1.0))),
        (-2.0..2.0f64).prop_map(Expr::real),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Expr::constant(Complex64::new(re, im))),
    ]
}

fn exprs() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| e.neg()),
            inner.clone().prop_map(|e| e.conj()),
            inner.clone().prop_map(|e| e.exp()),
            inner.clone().prop_map(|e| e.log()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(&b)),
            (inner, -4..5i32).prop_map(|(e, n)| e.pow(n)),
        ]
    })
}

proptest! {
    /// Printing and re-parsing is the identity on constructor-built trees.
    #[test]
    fn print_then_parse_is_identity(e in exprs()) {
        let printed = e.to_string();
        let back = parse(&printed)
            .unwrap_or_else(|err| panic!("printed form `{printed}` failed to re-parse: {err}"));
        prop_assert!(back == e, "`{}` re-parsed as `{}`", printed, back);
        // The printed form itself is a fixed point.
        prop_assert_eq!(back.to_string(), printed);
    }

    /// `conj` is an involution at the tree level.
    #[test]
    fn conj_is_an_involution(e in exprs()) {
        prop_assert!(e.conj().conj() == e);
    }

    /// Double negation collapses at the tree level.
    #[test]
    fn neg_is_an_involution(e in exprs()) {
        prop_assert!(e.neg().neg() == e);
    }
}
