//! Expression language for definable functions.
//!
//! Functions are built from the usual activation and loss primitives,
//! arithmetic, min/max selections, affine maps, polynomials, and composition.
//! Every expression carries enough structure to answer two questions beyond
//! evaluation: which o-minimal structure its primitives live in
//! ([`classify_structure`]), and where its kinks are (consumed by the
//! subdifferential machinery downstream).
//!
//! Values are immutable after construction and cheaply cloneable; shared
//! subexpressions form a DAG, so deep networks stay linear in size.

mod error;
mod expr;
mod network;
mod parse;
mod primitive;
mod structure;

pub use error::{ExprError, ParseError};
pub use expr::{Expr, ExprKind, PolyTerm};
pub use network::{
    build_empirical_risk, build_mlp, losses, risk_terms, Activation, Dataset, Layer, NetworkSpec,
};
pub use parse::{expr_from_json, expr_to_json, parse_expr, serialize_expr};
pub use primitive::{PrimDeriv, Primitive};
pub use structure::{classify_structure, StructureTag};


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            (-10.0..10.0f64).prop_map(Expr::constant),
            (0usize..3).prop_map(Expr::var),
        ]
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expr::relu),
                inner.clone().prop_map(Expr::abs),
                inner.clone().prop_map(Expr::square),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::max2(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::prod(a, b)),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::sum),
                ((-3.0..3.0f64), inner.clone()).prop_map(|(c, e)| Expr::scale(c, e)),
                (inner.clone(), (0.1..3.0f64))
                    .prop_map(|(e, b)| Expr::prim(Primitive::Swish(b), vec![e]).unwrap()),
                inner
                    .clone()
                    .prop_map(|e| Expr::prim(Primitive::Tanh, vec![e]).unwrap()),
            ]
        })
    }

    proptest! {
        /// Round trip is the identity on arbitrary expressions.
        #[test]
        fn round_trip_identity(e in arb_expr()) {
            let s = serialize_expr(&e);
            let e2 = parse_expr(&s).unwrap();
            prop_assert!(e == e2, "serialized: {s}");
            let j = expr_to_json(&e).to_string();
            let e3 = parse_expr(&j).unwrap();
            prop_assert!(e == e3);
        }

        /// Wrapping an expression in a larger tree never lowers the tag.
        #[test]
        fn tag_monotone(e in arb_expr()) {
            let before = classify_structure(&e);
            let wrapped = Expr::sum(vec![e, Expr::prim(Primitive::Gelu, vec![Expr::var(0)]).unwrap()]);
            let after = classify_structure(&wrapped);
            prop_assert!(after >= before);
            prop_assert!(after >= StructureTag::RPfaff);
        }
    }
}
