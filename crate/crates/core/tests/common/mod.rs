#![allow(dead_code)]

use liesym_core::expr::{Expr, Number};
use liesym_core::jet::jet;
use proptest::prelude::*;

pub fn p(s: &str) -> Expr {
    liesym_core::lang::parse(s).unwrap()
}

fn leaf(with_fns: bool, with_jets: bool) -> BoxedStrategy<Expr> {
    let mut opts: Vec<BoxedStrategy<Expr>> = vec![
        (-5i64..=5).prop_map(Expr::int).boxed(),
        (1i64..=4, 2i64..=5).prop_map(|(a, b)| Expr::rat(a, b)).boxed(),
        prop_oneof![Just("x"), Just("t"), Just("u"), Just("a"), Just("b")]
            .prop_map(Expr::sym)
            .boxed(),
    ];
    if with_jets {
        opts.push(
            prop_oneof![Just((1u32, 0u32)), Just((0, 1)), Just((2, 0))]
                .prop_map(jet)
                .boxed(),
        );
    }
    if with_fns {
        opts.push(
            prop_oneof![Just("f"), Just("h"), Just("k")]
                .prop_map(|n| Expr::func(n, &["x", "u"]))
                .boxed(),
        );
        opts.push(Just(Expr::Num(Number::Float(0.5))).boxed());
    }
    proptest::strategy::Union::new(opts).boxed()
}

/// Random expressions over `x, t, u`, parameters `a, b`, small numbers and,
/// optionally, unknown functions and jets.
pub fn expr(with_fns: bool, with_jets: bool) -> impl Strategy<Value = Expr> {
    leaf(with_fns, with_jets).prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::mul),
            (inner.clone(), -2i64..=3).prop_map(|(b, n)| Expr::powi(b, n)),
            inner.clone().prop_map(|a| Expr::exp(Expr::rat(1, 3) * a)),
            inner.clone().prop_map(Expr::ln),
            inner.clone().prop_map(Expr::sqrt),
            inner.prop_map(|a| -a),
        ]
    })
}

/// Polynomials in `x, t, u` and the first-order jets, with numeric and
/// parameter coefficients, optionally times unknown functions of `(x, u)`.
pub fn jet_poly() -> impl Strategy<Value = Expr> {
    let atom = prop_oneof![
        Just(Expr::sym("x")),
        Just(Expr::sym("t")),
        Just(Expr::sym("u")),
        Just(jet((1, 0))),
        Just(jet((0, 1))),
        Just(Expr::func("f", &["x", "u"])),
        Just(Expr::sym("a")),
        (-3i64..=3).prop_map(Expr::int),
    ];
    let term = prop::collection::vec(atom, 1..4).prop_map(Expr::mul);
    prop::collection::vec(term, 1..5).prop_map(Expr::add)
}

/// Polynomial field components in `x, t, u` (no jets).
pub fn component() -> impl Strategy<Value = Expr> {
    let atom = prop_oneof![
        Just(Expr::sym("x")),
        Just(Expr::sym("t")),
        Just(Expr::sym("u")),
        Just(Expr::exp(Expr::sym("t"))),
        (-3i64..=3).prop_map(Expr::int),
    ];
    let term = prop::collection::vec(atom, 1..4).prop_map(Expr::mul);
    prop::collection::vec(term, 1..4).prop_map(Expr::add)
}
