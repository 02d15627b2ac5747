use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ReduceError;
use crate::expr::{diff, eval_num, is_zero, simplify, Expr, SamplingBox, Verdict};
use crate::jet::VectorField;

/// Invariants `(r, w)` with `r_u = 0` and `w = A u + B`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPair {
    pub r: Expr,
    pub w: Expr,
    pub a: Expr,
    pub b: Expr,
}

impl InvariantPair {
    pub fn new(r: Expr, w: Expr) -> Result<Self, ReduceError> {
        let r = simplify(&r);
        let w = simplify(&w);
        if !is_zero(&diff(&r, "u")) {
            return Err(ReduceError::UnsupportedInvariantForm(format!("r = {} depends on u", r)));
        }
        let a = diff(&w, "u");
        if !is_zero(&diff(&a, "u")) {
            return Err(ReduceError::UnsupportedInvariantForm(format!("w = {} is not affine in u", w)));
        }
        if is_zero(&a) {
            return Err(ReduceError::UnsupportedInvariantForm(format!("w = {} does not involve u", w)));
        }
        let b = simplify(&(w.clone() - a.clone() * Expr::sym("u")));
        Ok(InvariantPair { r, w, a, b })
    }

    /// Functional independence: some 2×2 minor of the Jacobian of `(r, w)`
    /// with respect to `(x, t, u)` is nonzero at a sampled point.
    pub fn independent(&self, seed: u64) -> bool {
        let vars = ["x", "t", "u"];
        let jr: Vec<Expr> = vars.iter().map(|v| diff(&self.r, v)).collect();
        let jw: Vec<Expr> = vars.iter().map(|v| diff(&self.w, v)).collect();
        let mut minors = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                minors.push(simplify(&(jr[i].clone() * jw[j].clone() - jr[j].clone() * jw[i].clone())));
            }
        }
        if minors.iter().any(|m| m.as_num().is_some_and(|n| !n.is_zero())) {
            return true;
        }
        let all = Expr::add(minors.clone());
        let mut keys = all.eval_keys();
        keys.extend(["x", "t", "u"].map(String::from));
        let bx = SamplingBox::with_params(keys.iter().filter(|k| !matches!(k.as_str(), "x" | "t" | "u")).cloned());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let a = bx.sample(&keys, &all.function_labels(), &mut rng);
            if minors
                .iter()
                .any(|m| eval_num(m, &a).is_ok_and(|v| v.abs() > 1e-8))
            {
                return true;
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    /// `X(r)` after simplification.
    pub xr: Expr,
    /// `X(w)` after simplification.
    pub xw: Expr,
    /// Both vanish symbolically.
    pub exact: bool,
    pub verdicts: Vec<Verdict>,
    pub independent: bool,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// `X(r) = 0` and `X(w) = 0`, symbolically or by the oracle, plus
/// functional independence of `r` and `w`.
pub fn verify_invariants(field: &VectorField, inv: &InvariantPair, tol: f64, seed: u64) -> InvariantReport {
    let xr = field.apply(&inv.r);
    let xw = field.apply(&inv.w);
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    let mut ok = true;
    for e in [&xr, &xw] {
        if is_zero(e) {
            continue;
        }
        let params = e.symbols().into_iter().filter(|s| !matches!(s.as_str(), "x" | "t" | "u"));
        match SamplingBox::with_params(params).vanishes(e, 100, tol, seed) {
            Ok(v) => {
                ok &= v.equivalent;
                verdicts.push(v);
            }
            Err(err) => {
                ok = false;
                notes.push(err.to_string());
            }
        }
    }
    let exact = is_zero(&xr) && is_zero(&xw);
    let independent = inv.independent(seed);
    if !independent {
        notes.push("r and w are functionally dependent".into());
    }
    InvariantReport {
        xr,
        xw,
        exact,
        verdicts,
        independent,
        pass: ok && independent,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn affine_metadata() {
        let inv = InvariantPair::new(p("x*t"), p("x*u")).unwrap();
        assert_eq!(inv.a, p("x"));
        assert!(inv.b.is_num_zero());
        let inv = InvariantPair::new(p("t"), p("u + b*ln(x)")).unwrap();
        assert_eq!(inv.b, simplify(&p("b*ln(x)")));
        assert!(InvariantPair::new(p("u"), p("x")).is_err());
        assert!(InvariantPair::new(p("x"), p("u^2")).is_err());
    }

    #[test]
    fn independence() {
        assert!(InvariantPair::new(p("x"), p("u")).unwrap().independent(1));
        assert!(!InvariantPair::new(p("x"), p("x*u - x*u + x")).is_ok_and(|i| i.independent(1)));
    }

    #[test]
    fn scaling_invariants() {
        let x = VectorField::new(p("x"), p("-t"), p("-u"));
        let rep = verify_invariants(&x, &InvariantPair::new(p("x*t"), p("x*u")).unwrap(), 1e-10, 1);
        assert!(rep.exact && rep.pass);
    }
}
