//! Immutable symbolic expressions.
//!
//! An [`Expr`] is a plain tree over numbers, symbols, unknown-function
//! applications, sums, products, powers and the unary functions `exp`, `ln`
//! and `sqrt`. Constructors in this module build raw trees; [`simplify`]
//! brings a tree into canonical form and [`expand`] additionally distributes
//! products over sums.
//!
//! The derived ordering on [`Expr`] is the canonical node order used for
//! sorting sums and products: constants < symbols (lexicographic) < function
//! symbols < compound nodes.

mod collect;
mod diff;
mod eval;
mod number;
mod oracle;
mod simplify;
mod subst;

use std::collections::BTreeSet;
use std::ops;

pub use collect::{clearing_multiplier, collect, Monomial, NotPolynomialInVars};
pub use diff::diff;
pub use eval::{eval_num, Assignment, EvalError};
pub use number::Number;
pub use oracle::{equiv_oracle, residual_oracle, OracleError, SamplingBox, Verdict};
pub(crate) use simplify::split_coeff;
pub use simplify::{expand, is_zero, simplify};
pub use subst::{instantiate, substitute, SubstError};

/// An unknown function applied to arguments, carrying a derivative multi-index.
///
/// `slots` names the function's formal parameters (they drive the derivative
/// label, e.g. `f_xu`); `args` are the actual arguments. For `f(x, u)` both
/// are `[x, u]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnSym {
    pub name: String,
    pub slots: Vec<String>,
    pub d: Vec<u32>,
    pub args: Vec<Expr>,
}

impl FnSym {
    /// `name(slots...)` applied to its own slot symbols, underived.
    pub fn new(name: &str, slots: &[&str]) -> Self {
        FnSym {
            name: name.to_string(),
            slots: slots.iter().map(|s| s.to_string()).collect(),
            d: vec![0; slots.len()],
            args: slots.iter().map(|s| Expr::sym(s)).collect(),
        }
    }

    pub fn order(&self) -> u32 {
        self.d.iter().sum()
    }

    /// Derivative label: the name followed by slot letters, e.g. `f_xu`.
    pub fn label(&self) -> String {
        let mut s = self.name.clone();
        if self.order() > 0 {
            s.push('_');
            for (slot, &n) in self.slots.iter().zip(&self.d) {
                for _ in 0..n {
                    s.push_str(slot);
                }
            }
        }
        s
    }

    /// True when the arguments are exactly the slot symbols.
    pub fn has_default_args(&self) -> bool {
        self.args.len() == self.slots.len()
            && self
                .args
                .iter()
                .zip(&self.slots)
                .all(|(a, s)| matches!(a, Expr::Sym(n) if n == s))
    }

    /// Same function, derivative index incremented in slot `i`.
    pub fn derived(&self, i: usize) -> FnSym {
        let mut g = self.clone();
        g.d[i] += 1;
        g
    }

    pub fn with_d(&self, d: &[u32]) -> FnSym {
        let mut g = self.clone();
        g.d = d.to_vec();
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Num(Number),
    Sym(String),
    Fn(FnSym),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Number::int(n))
    }

    pub fn rat(p: i64, q: i64) -> Expr {
        Expr::Num(Number::rat(p, q))
    }

    pub fn float(x: f64) -> Expr {
        Expr::Num(Number::Float(x))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    /// Unknown function `name` over `slots`, e.g. `Expr::func("f", &["x", "u"])`.
    pub fn func(name: &str, slots: &[&str]) -> Expr {
        Expr::Fn(FnSym::new(name, slots))
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Add(terms),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Mul(factors),
        }
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::int(n))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::Exp(Box::new(arg))
    }

    pub fn ln(arg: Expr) -> Expr {
        Expr::Ln(Box::new(arg))
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::Sqrt(Box::new(arg))
    }

    pub fn recip(self) -> Expr {
        Expr::powi(self, -1)
    }

    pub fn as_num(&self) -> Option<&Number> {
        match self {
            Expr::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Expr::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_num_zero(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_zero())
    }

    pub fn is_num_one(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_one())
    }

    /// Direct children, in order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Sym(_) => vec![],
            Expr::Fn(f) => f.args.iter().collect(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().collect(),
            Expr::Pow(b, e) => vec![b, e],
            Expr::Exp(a) | Expr::Ln(a) | Expr::Sqrt(a) => vec![a],
        }
    }

    /// Rebuild this node with new children (same arity as `children()`).
    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Fn(g) => {
                let mut g = g.clone();
                g.args = g.args.iter().map(&mut f).collect();
                Expr::Fn(g)
            }
            Expr::Add(v) => Expr::Add(v.iter().map(f).collect()),
            Expr::Mul(v) => Expr::Mul(v.iter().map(f).collect()),
            Expr::Pow(b, e) => Expr::pow(f(b), f(e)),
            Expr::Exp(a) => Expr::exp(f(a)),
            Expr::Ln(a) => Expr::ln(f(a)),
            Expr::Sqrt(a) => Expr::sqrt(f(a)),
        }
    }

    /// Plain symbols occurring anywhere, including inside function arguments.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Names an [`Assignment`] must bind to evaluate this expression: plain
    /// symbols plus unknown-function labels (function arguments are not
    /// descended into, since a function value is a coordinate of its own).
    pub fn eval_keys(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_eval_keys(self, &mut out);
        out
    }

    /// Labels of the unknown-function nodes occurring anywhere.
    pub fn function_labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Fn(f) = e {
                out.insert(f.label());
            }
        });
        out
    }

    /// Free names: symbols and function labels.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = self.symbols();
        out.extend(self.function_labels());
        out
    }

    /// True when `self` depends on symbol `s` (directly or through function
    /// arguments).
    pub fn depends_on(&self, s: &str) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(n) => n == s,
            _ => self.children().into_iter().any(|c| c.depends_on(s)),
        }
    }

    pub fn contains_fn(&self, name: &str) -> bool {
        match self {
            Expr::Fn(f) if f.name == name => true,
            _ => self.children().into_iter().any(|c| c.contains_fn(name)),
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    /// Terms of a sum (the expression itself when it is not a sum).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(v) => v.clone(),
            e if e.is_num_zero() => vec![],
            e => vec![e.clone()],
        }
    }

    /// Factors of a product (the expression itself when it is not a product).
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Mul(v) => v.clone(),
            e => vec![e.clone()],
        }
    }
}

fn collect_eval_keys(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Sym(s) => {
            out.insert(s.clone());
        }
        Expr::Fn(f) => {
            out.insert(f.label());
        }
        _ => {
            for c in e.children() {
                collect_eval_keys(c, out);
            }
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<&str> for Expr {
    fn from(s: &str) -> Self {
        Expr::sym(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $build:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $build(self, Expr::int(rhs))
            }
        }
        impl ops::$trait<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(Expr::int(self), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::Add(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::Add(vec![a, Expr::Mul(vec![Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| Expr::Mul(vec![a, b]));
binop!(Div, div, |a, b: Expr| Expr::Mul(vec![a, b.recip()]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_kind_order() {
        let c = Expr::int(5);
        let s = Expr::sym("a");
        let f = Expr::func("f", &["x", "u"]);
        let sum = Expr::Add(vec![Expr::sym("x"), Expr::sym("y")]);
        assert!(c < s);
        assert!(s < Expr::sym("b"));
        assert!(Expr::sym("zzz") < f);
        assert!(f < sum);
    }

    #[test]
    fn labels() {
        let f = FnSym::new("f", &["x", "u"]);
        assert_eq!(f.label(), "f");
        assert_eq!(f.derived(0).derived(1).label(), "f_xu");
        assert_eq!(f.derived(1).derived(0), f.derived(0).derived(1));
        assert_eq!(f.derived(0).derived(0).label(), "f_xx");
    }

    #[test]
    fn eval_keys_do_not_descend_into_args() {
        let e = Expr::func("f", &["x", "u"]) * Expr::sym("u_x");
        let keys: Vec<_> = e.eval_keys().into_iter().collect();
        assert_eq!(keys, vec!["f".to_string(), "u_x".to_string()]);
    }
}
