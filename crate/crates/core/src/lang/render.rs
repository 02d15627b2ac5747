//! Canonical text rendering. Output always re-parses in the standard scope.

use std::fmt;

use crate::expr::{Expr, Number};

use super::parse::standard_functions;

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

pub fn render(e: &Expr) -> String {
    wrap(e, 0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

fn wrap(e: &Expr, ctx: u8) -> String {
    let (s, p) = inner(e);
    if p < ctx {
        format!("({})", s)
    } else {
        s
    }
}

fn number(n: &Number) -> (String, u8) {
    let s = n.to_string();
    let p = if s.contains('/') {
        MUL
    } else if n.is_negative() {
        NEG
    } else {
        ATOM
    };
    (s, p)
}

fn inner(e: &Expr) -> (String, u8) {
    match e {
        Expr::Num(n) => number(n),
        Expr::Sym(s) => (s.clone(), ATOM),
        Expr::Fn(f) => {
            let bare = f.has_default_args()
                && standard_functions()
                    .iter()
                    .any(|(n, s)| *n == f.name && s.iter().copied().eq(f.slots.iter().map(String::as_str)));
            if bare {
                (f.label(), ATOM)
            } else {
                let args: Vec<String> = f.args.iter().map(|a| wrap(a, 0)).collect();
                (format!("{}({})", f.label(), args.join(", ")), ATOM)
            }
        }
        Expr::Add(v) => {
            let mut s = String::new();
            for (i, t) in v.iter().enumerate() {
                match negated(t) {
                    Some(pos) if i > 0 => {
                        s.push_str(" - ");
                        s.push_str(&wrap(&pos, MUL));
                    }
                    _ => {
                        if i > 0 {
                            s.push_str(" + ");
                        }
                        s.push_str(&wrap(t, ADD + 1));
                    }
                }
            }
            (s, ADD)
        }
        Expr::Mul(v) => product(v),
        Expr::Pow(b, x) => {
            if let Some(n) = x.as_num() {
                if *n == Number::rat(1, 2) {
                    return (format!("sqrt({})", wrap(b, 0)), ATOM);
                }
                if n.is_negative() && b.as_num().is_none() {
                    return product(std::slice::from_ref(e));
                }
            }
            (format!("{}^{}", wrap(b, ATOM), wrap(x, NEG)), POW)
        }
        Expr::Exp(a) => (format!("exp({})", wrap(a, 0)), ATOM),
        Expr::Ln(a) => (format!("ln({})", wrap(a, 0)), ATOM),
        Expr::Sqrt(a) => (format!("sqrt({})", wrap(a, 0)), ATOM),
    }
}

/// `-t` as a positive term, when `t` carries a negative leading coefficient.
fn negated(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Num(n) if n.is_negative() => Some(Expr::Num(n.neg())),
        Expr::Mul(v) => match &v[0] {
            Expr::Num(n) if n.is_negative() => {
                let mut w = v.clone();
                if exact_one(&n.neg()) {
                    w.remove(0);
                } else {
                    w[0] = Expr::Num(n.neg());
                }
                Some(Expr::mul(w))
            }
            _ => None,
        },
        _ => None,
    }
}

fn product(v: &[Expr]) -> (String, u8) {
    let mut negative = false;
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in v {
        match f {
            Expr::Num(n) => {
                let n = if n.is_negative() {
                    negative = !negative;
                    n.neg()
                } else {
                    n.clone()
                };
                match &n {
                    Number::Rat(r) if !r.is_integer() => {
                        if !r.numer().to_string().eq("1") {
                            num.push(r.numer().to_string());
                        }
                        den.push(r.denom().to_string());
                    }
                    _ if exact_one(&n) => {}
                    _ => num.push(n.to_string()),
                }
            }
            Expr::Pow(b, x) if x.as_num().is_some_and(Number::is_negative) && b.as_num().is_none() => {
                let pos = x.as_num().unwrap().neg();
                let p = Expr::pow(b.as_ref().clone(), Expr::Num(pos));
                let s = if p_is_one_power(&p) {
                    wrap(b, POW)
                } else {
                    wrap(&p, POW)
                };
                den.push(s);
            }
            f => num.push(wrap(f, NEG + 1)),
        }
    }
    let mut s = if num.is_empty() { "1".to_string() } else { num.join("*") };
    let single = num.len() <= 1 && den.is_empty();
    for d in &den {
        s.push('/');
        s.push_str(d);
    }
    if negative {
        (format!("-{}", s), if single { NEG } else { MUL })
    } else {
        (s, if single && num.len() == 1 && !v.is_empty() { inner_prec(v) } else { MUL })
    }
}

fn exact_one(n: &Number) -> bool {
    !n.is_float() && n.is_one()
}

fn p_is_one_power(p: &Expr) -> bool {
    matches!(p, Expr::Pow(_, x) if x.is_num_one())
}

fn inner_prec(v: &[Expr]) -> u8 {
    // A product that renders as a single factor keeps that factor's precedence.
    let non_unit: Vec<&Expr> = v.iter().filter(|f| !f.is_num_one()).collect();
    if non_unit.len() == 1 {
        inner(non_unit[0]).1
    } else {
        MUL
    }
}
