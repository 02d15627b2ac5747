use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{DeterminingError, EvolutionPDE};
use crate::expr::{expand, substitute, Expr};
use crate::jet::{self, JetContext, MultiIndex, VectorField};

/// How the criterion residual is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// `X^(2) Δ` with every jet coordinate independent.
    Free,
    /// `X^(2) Δ` restricted to `Δ = 0` and its differential consequences:
    /// every jet coordinate with a `t` index is replaced by its value
    /// computed from `rhs`.
    Evolution,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Free => "free",
            Mode::Evolution => "evolution",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "free" => Ok(Mode::Free),
            "evolution" => Ok(Mode::Evolution),
            other => Err(format!("unknown mode `{}` (expected free or evolution)", other)),
        }
    }
}

pub fn criterion_residual(pde: &EvolutionPDE, field: &VectorField, mode: Mode) -> Result<Expr, DeterminingError> {
    let r = JetContext::default().apply_prolonged(field, &pde.delta)?;
    match mode {
        Mode::Free => Ok(r),
        Mode::Evolution => restrict(pde, &r),
    }
}

/// Replace every t-carrying jet coordinate by its value on the solution
/// manifold of `pde`.
pub(crate) fn restrict(pde: &EvolutionPDE, e: &Expr) -> Result<Expr, DeterminingError> {
    let mut m = Manifold {
        pde,
        ctx: JetContext::new(8),
        memo: BTreeMap::new(),
    };
    let mut bindings = BTreeMap::new();
    for name in jet::jets_in(e) {
        let j = jet::parse_jet(&name).unwrap();
        if j.1 > 0 {
            bindings.insert(name, m.value(j)?);
        }
    }
    let out = expand(&substitute(e, &bindings).expect("replacements are free of t-jets"));
    if let Some(coord) = jet::jets_in(&out).into_iter().find(|n| jet::parse_jet(n).unwrap().1 > 0) {
        return Err(DeterminingError::ResidualOrderLeak { coord });
    }
    Ok(out)
}

struct Manifold<'a> {
    pde: &'a EvolutionPDE,
    ctx: JetContext,
    memo: BTreeMap<MultiIndex, Expr>,
}

impl Manifold<'_> {
    /// `u_{(a, b)}` with `b >= 1` expressed through x-derivatives only.
    fn value(&mut self, j: MultiIndex) -> Result<Expr, DeterminingError> {
        if let Some(v) = self.memo.get(&j) {
            return Ok(v.clone());
        }
        let v = if j.1 == 1 {
            self.ctx.total_d_multi(&self.pde.rhs, (j.0, 0))?
        } else {
            let prev = self.value((j.0, j.1 - 1))?;
            let dt = self.ctx.total_d(&prev, jet::T)?;
            let mut bindings = BTreeMap::new();
            for name in jet::jets_in(&dt) {
                let k = jet::parse_jet(&name).unwrap();
                if k.1 > 0 {
                    bindings.insert(name, self.value(k)?);
                }
            }
            substitute(&dt, &bindings).expect("replacements are free of t-jets")
        };
        let v = expand(&v);
        self.memo.insert(j, v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determining::build_grdc;
    use crate::expr::is_zero;
    use crate::lang::parse;

    #[test]
    fn time_translation_is_trivial() {
        let pde = build_grdc(parse("f").unwrap(), parse("h").unwrap(), parse("k").unwrap()).unwrap();
        for mode in [Mode::Free, Mode::Evolution] {
            assert!(criterion_residual(&pde, &VectorField::dt(), mode).unwrap().is_num_zero());
        }
    }

    #[test]
    fn heat_scaling() {
        let pde = build_grdc(Expr::one(), Expr::zero(), Expr::zero()).unwrap();
        let field = VectorField::new(parse("x").unwrap(), parse("2*t").unwrap(), Expr::zero());
        let r = criterion_residual(&pde, &field, Mode::Evolution).unwrap();
        assert!(is_zero(&r), "{}", r);
    }

    #[test]
    fn second_t_derivative_value() {
        let pde = build_grdc(Expr::one(), Expr::zero(), Expr::zero()).unwrap();
        let e = restrict(&pde, &parse("u_tt").unwrap()).unwrap();
        assert_eq!(e, parse("u_xxxx").unwrap());
    }
}
