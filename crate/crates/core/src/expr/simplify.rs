//! Canonical simplification and polynomial expansion.
//!
//! `simplify` flattens sums and products, folds numeric constants, collects
//! like terms (`2*x*t + t*x -> 3*t*x`) and like powers (`x*x^-1 -> 1`), and
//! sorts by the canonical node order. It never distributes and never rewrites
//! `exp`/`ln` identities beyond `exp(0)`, `ln(1)`, `exp(ln a)` and `ln(exp a)`.
//! `sqrt(a)` is canonicalized to `a^(1/2)`.
//!
//! `expand` additionally distributes products over sums and expands positive
//! integer powers of sums, so that Laurent polynomials in any set of atoms have
//! a unique form.

use std::collections::BTreeMap;

use super::{Expr, FnSym, Number};

const MAX_PASSES: usize = 32;
const MAX_EXPAND_POWER: i64 = 16;

/// Canonical form of `e`. Idempotent.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = pass(e);
    for _ in 0..MAX_PASSES {
        let next = pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

/// Fully expanded canonical form of `e`.
pub fn expand(e: &Expr) -> Expr {
    let mut cur = simplify(&expand_node(&simplify(e)));
    for _ in 0..MAX_PASSES {
        let next = simplify(&expand_node(&cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

/// Symbolic zero test: true when the expanded form is the constant 0.
pub fn is_zero(e: &Expr) -> bool {
    expand(e).is_num_zero()
}

fn pass(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) => e.clone(),
        Expr::Fn(f) => Expr::Fn(canonical_fn(f, f.args.iter().map(pass).collect())),
        Expr::Add(v) => add(v.iter().map(pass).collect()),
        Expr::Mul(v) => mul(v.iter().map(pass).collect()),
        Expr::Pow(b, x) => pow(pass(b), pass(x)),
        Expr::Exp(a) => exp(pass(a)),
        Expr::Ln(a) => ln(pass(a)),
        Expr::Sqrt(a) => pow(pass(a), Expr::rat(1, 2)),
    }
}

/// Slot names are dummies: when every argument is a distinct plain symbol the
/// slots are renamed after the arguments, so `F(u)[u -> W]` and `F(W)` agree.
fn canonical_fn(f: &FnSym, args: Vec<Expr>) -> FnSym {
    let mut g = f.clone();
    g.args = args;
    let names: Vec<&str> = g.args.iter().filter_map(Expr::as_sym).collect();
    if names.len() == g.args.len() {
        let mut uniq = names.clone();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() == names.len() {
            g.slots = names.iter().map(|s| s.to_string()).collect();
        }
    }
    g
}

/// Split a simplified term into its numeric coefficient and the rest.
pub(crate) fn split_coeff(t: &Expr) -> (Number, Expr) {
    match t {
        Expr::Num(n) => (n.clone(), Expr::one()),
        Expr::Mul(v) => match &v[0] {
            Expr::Num(n) => (n.clone(), Expr::mul(v[1..].to_vec())),
            _ => (Number::one(), t.clone()),
        },
        _ => (Number::one(), t.clone()),
    }
}

/// `c * rest` in canonical shape (`rest` already canonical and not a number).
pub(crate) fn with_coeff(c: Number, rest: Expr) -> Expr {
    if c.is_one() && !c.is_float() {
        return rest;
    }
    if rest.is_num_one() {
        return Expr::Num(c);
    }
    match rest {
        Expr::Mul(mut v) => {
            v.insert(0, Expr::Num(c));
            Expr::Mul(v)
        }
        r => Expr::Mul(vec![Expr::Num(c), r]),
    }
}

/// Canonical sum of already-canonical terms.
pub(crate) fn add(terms: Vec<Expr>) -> Expr {
    let mut constant = Number::zero();
    let mut groups: BTreeMap<Expr, Number> = BTreeMap::new();
    let mut stack = terms;
    while let Some(t) = stack.pop() {
        match t {
            Expr::Add(v) => stack.extend(v),
            Expr::Num(n) => constant = constant.add(&n),
            t => {
                let (c, rest) = split_coeff(&t);
                let slot = groups.entry(rest).or_insert_with(Number::zero);
                *slot = slot.add(&c);
            }
        }
    }
    let mut out = Vec::with_capacity(groups.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::Num(constant));
    }
    for (rest, c) in groups {
        if !c.is_zero() {
            out.push(with_coeff(c, rest));
        }
    }
    Expr::add(out)
}

/// Canonical product of already-canonical factors.
pub(crate) fn mul(factors: Vec<Expr>) -> Expr {
    let mut coef = Number::one();
    let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f {
            Expr::Mul(v) => stack.extend(v),
            Expr::Num(n) => coef = coef.mul(&n),
            Expr::Pow(b, x) => bases.entry(*b).or_default().push(*x),
            f => bases.entry(f).or_default().push(Expr::one()),
        }
    }
    if coef.is_zero() {
        return Expr::Num(coef);
    }
    let mut out = Vec::with_capacity(bases.len());
    for (base, exps) in bases {
        let x = add(exps);
        if x.is_num_zero() {
            continue;
        }
        match pow(base, x) {
            Expr::Num(n) => coef = coef.mul(&n),
            Expr::Mul(v) => {
                for f in v {
                    match f {
                        Expr::Num(n) => coef = coef.mul(&n),
                        f => out.push(f),
                    }
                }
            }
            p => out.push(p),
        }
    }
    if coef.is_zero() {
        return Expr::Num(coef);
    }
    out.sort();
    if !coef.is_one() || coef.is_float() {
        out.insert(0, Expr::Num(coef));
    }
    Expr::mul(out)
}

fn is_integer(e: &Expr) -> bool {
    matches!(e, Expr::Num(n) if n.as_integer().is_some())
}

/// Canonical power of canonical base and exponent.
pub(crate) fn pow(base: Expr, x: Expr) -> Expr {
    if x.is_num_zero() {
        return Expr::one();
    }
    if x.is_num_one() {
        return base;
    }
    if base.is_num_one() {
        return Expr::one();
    }
    if let (Expr::Num(b), Expr::Num(n)) = (&base, &x) {
        if b.is_zero() && !n.is_negative() {
            return Expr::zero();
        }
        if let Some(v) = b.pow(n) {
            return Expr::Num(v);
        }
        return Expr::pow(base, x);
    }
    if is_integer(&x) {
        match base {
            Expr::Pow(b, y) => return pow(*b, mul(vec![*y, x])),
            Expr::Mul(v) => return mul(v.into_iter().map(|f| pow(f, x.clone())).collect()),
            _ => {}
        }
    }
    Expr::pow(base, x)
}

pub(crate) fn exp(a: Expr) -> Expr {
    if a.is_num_zero() {
        return Expr::one();
    }
    match a {
        Expr::Ln(b) => *b,
        a => Expr::exp(a),
    }
}

pub(crate) fn ln(a: Expr) -> Expr {
    if a.is_num_one() {
        return Expr::zero();
    }
    match a {
        Expr::Exp(b) => *b,
        a => Expr::ln(a),
    }
}

/// One bottom-up expansion sweep over a canonical tree.
fn expand_node(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Sym(_) => e.clone(),
        Expr::Fn(f) => Expr::Fn(canonical_fn(f, f.args.iter().map(expand_node).collect())),
        Expr::Add(v) => add(v.iter().map(expand_node).collect()),
        Expr::Mul(v) => expand_product(v.iter().map(expand_node).collect()),
        Expr::Pow(b, x) => {
            let b = expand_node(b);
            let x = expand_node(x);
            match pow(b, x) {
                Expr::Mul(v) => expand_product(v),
                p => expand_power_of_sum(p),
            }
        }
        Expr::Exp(a) => exp(expand_node(a)),
        Expr::Ln(a) => ln(expand_node(a)),
        Expr::Sqrt(a) => pow(expand_node(a), Expr::rat(1, 2)),
    }
}

fn expand_power_of_sum(p: Expr) -> Expr {
    if let Expr::Pow(b, x) = &p {
        if let (Expr::Add(_), Some(n)) = (b.as_ref(), x.as_num().and_then(Number::as_i64)) {
            if (2..=MAX_EXPAND_POWER).contains(&n) {
                let factors = vec![b.as_ref().clone(); n as usize];
                return expand_product(factors);
            }
        }
    }
    p
}

/// Distribute a product of expanded factors.
fn expand_product(factors: Vec<Expr>) -> Expr {
    let mut acc: Vec<Expr> = vec![Expr::one()];
    let mut plain: Vec<Expr> = Vec::new();
    for f in factors {
        let f = expand_power_of_sum(f);
        match f {
            Expr::Add(ts) => {
                let mut next = Vec::with_capacity(acc.len() * ts.len());
                for a in &acc {
                    for t in &ts {
                        next.push(mul(vec![a.clone(), t.clone()]));
                    }
                }
                acc = add(next).terms();
                if acc.is_empty() {
                    return Expr::zero();
                }
            }
            f => plain.push(f),
        }
    }
    let common = mul(plain);
    add(acc.into_iter().map(|a| mul(vec![a, common.clone()])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }
    fn t() -> Expr {
        Expr::sym("t")
    }
    fn u() -> Expr {
        Expr::sym("u")
    }

    #[test]
    fn additive_identity() {
        let e = u() + Expr::int(0) * x();
        assert_eq!(simplify(&e), u());
    }

    #[test]
    fn like_terms() {
        let e = 2 * (x() * t()) + t() * x();
        assert_eq!(simplify(&e), simplify(&(3 * x() * t())));
        assert_eq!(simplify(&e), Expr::Mul(vec![Expr::int(3), t(), x()]));
    }

    #[test]
    fn power_rules() {
        assert_eq!(simplify(&Expr::pow(x(), Expr::one())), x());
        assert_eq!(simplify(&Expr::pow(x() + t(), Expr::zero())), Expr::one());
        assert_eq!(simplify(&(x() * x().recip())), Expr::one());
        assert_eq!(simplify(&(x() * x())), Expr::powi(x(), 2));
        let sq = Expr::pow(Expr::sqrt(x()), Expr::int(2));
        assert_eq!(simplify(&sq), x());
        assert_eq!(simplify(&(Expr::one() * x())), x());
    }

    #[test]
    fn exponentials_are_not_merged() {
        let a = Expr::sym("a");
        let c1 = Expr::sym("c1");
        let e = Expr::exp(a.clone() * t()) * Expr::exp(a * c1);
        let s = simplify(&e);
        match &s {
            Expr::Mul(v) => assert!(v.iter().all(|f| matches!(f, Expr::Exp(_)))),
            other => panic!("expected product of exponentials, got {:?}", other),
        }
    }

    #[test]
    fn exp_ln_basics() {
        assert_eq!(simplify(&Expr::exp(Expr::zero())), Expr::one());
        assert_eq!(simplify(&Expr::ln(Expr::one())), Expr::zero());
        assert_eq!(simplify(&Expr::ln(Expr::exp(x()))), x());
    }

    #[test]
    fn expansion() {
        let e = (x() + 1) * (x() - 1);
        assert_eq!(expand(&e), simplify(&(x() * x() - 1)));
        let sq = Expr::powi(x() + t(), 2);
        assert_eq!(expand(&sq), simplify(&(x() * x() + 2 * x() * t() + t() * t())));
        assert!(is_zero(&(Expr::powi(x() + 1, 2) - x() * x() - 2 * x() - 1)));
    }

    #[test]
    fn rational_exponent_products() {
        let e = Expr::sqrt(x()) * Expr::sqrt(x());
        assert_eq!(simplify(&e), x());
        let e = Expr::rat(1, 2) * Expr::pow(x(), Expr::rat(-1, 2)) * x();
        assert_eq!(simplify(&e), simplify(&(Expr::rat(1, 2) * Expr::sqrt(x()))));
    }

    #[test]
    fn slot_renaming() {
        let f = Expr::func("F", &["u"]);
        let renamed = match &f {
            Expr::Fn(g) => {
                let mut g = g.clone();
                g.args = vec![Expr::sym("W")];
                Expr::Fn(g)
            }
            _ => unreachable!(),
        };
        assert_eq!(simplify(&renamed), Expr::func("F", &["W"]));
    }

    #[test]
    fn idempotent_on_nested() {
        let e = Expr::pow(x() * Expr::powi(t(), 2), Expr::int(3)) * Expr::powi(x(), -3) + x() * Expr::zero();
        let s = simplify(&e);
        assert_eq!(simplify(&s), s);
        assert_eq!(s, Expr::powi(t(), 6));
    }
}
