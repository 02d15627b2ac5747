use super::{simplify, Expr};

/// Partial derivative of `e` with respect to the symbol `s`.
///
/// Every other symbol (jet coordinates included) is held fixed. Unknown
/// functions differentiate by the chain rule through their arguments, so for
/// `f(x, u)` the result is `f_x` when `s = x` and `0` when `s = t`.
pub fn diff(e: &Expr, s: &str) -> Expr {
    simplify(&d(e, s))
}

fn d(e: &Expr, s: &str) -> Expr {
    if !e.depends_on(s) {
        return Expr::zero();
    }
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(_) => Expr::one(),
        Expr::Fn(f) => Expr::add(
            f.args
                .iter()
                .enumerate()
                .filter(|(_, a)| a.depends_on(s))
                .map(|(i, a)| Expr::Fn(f.derived(i)) * d(a, s))
                .collect(),
        ),
        Expr::Add(v) => Expr::add(v.iter().filter(|t| t.depends_on(s)).map(|t| d(t, s)).collect()),
        Expr::Mul(v) => {
            let mut terms = Vec::new();
            for (i, fi) in v.iter().enumerate() {
                if !fi.depends_on(s) {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(v.len());
                factors.push(d(fi, s));
                factors.extend(v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()));
                terms.push(Expr::Mul(factors));
            }
            Expr::add(terms)
        }
        Expr::Pow(b, x) => {
            let (b, x) = (b.as_ref(), x.as_ref());
            if !x.depends_on(s) {
                // x * b^(x-1) * b'
                Expr::Mul(vec![
                    x.clone(),
                    Expr::pow(b.clone(), x.clone() - 1),
                    d(b, s),
                ])
            } else if !b.depends_on(s) {
                Expr::Mul(vec![e.clone(), Expr::ln(b.clone()), d(x, s)])
            } else {
                let inner = d(x, s) * Expr::ln(b.clone()) + x.clone() * d(b, s) * b.clone().recip();
                e.clone() * inner
            }
        }
        Expr::Exp(a) => e.clone() * d(a, s),
        Expr::Ln(a) => d(a, s) * a.as_ref().clone().recip(),
        Expr::Sqrt(a) => Expr::Mul(vec![
            Expr::rat(1, 2),
            Expr::pow(a.as_ref().clone(), Expr::rat(-1, 2)),
            d(a, s),
        ]),
    }
}
