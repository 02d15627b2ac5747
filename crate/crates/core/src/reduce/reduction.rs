use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InvariantPair, ReduceError};
use crate::determining::EvolutionPDE;
use crate::expr::{diff, eval_num, expand, simplify, substitute, Assignment, EvalError, Expr, OracleError, SamplingBox, Verdict};
use crate::jet::{jets_in, parse_jet};

/// Name of the `k`-th derivative of `unknown` with respect to `indep`:
/// `W`, `W_r`, `W_rr`, ...
pub fn ode_jet(unknown: &str, indep: &str, k: usize) -> String {
    if k == 0 {
        unknown.to_string()
    } else {
        format!("{}_{}", unknown, indep.repeat(k))
    }
}

/// How the ODE was obtained from its source equation.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeOfVariables {
    /// Replacements applied to the source, e.g. `u ↦ (W - B)/A`, `u_x ↦ ...`.
    pub bindings: Vec<(String, Expr)>,
    /// Variable eliminated in favour of the new independent symbol.
    pub eliminated: Option<(String, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    /// The residual is free of the leftover variable after simplification.
    Symbolic,
    /// The leftover variable survived simplification; the independence
    /// oracle showed it has no effect.
    OracleCertified,
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certification::Symbolic => "symbolic",
            Certification::OracleCertified => "oracle-certified",
        })
    }
}

/// `R(indep, unknown, unknown', ...) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedODE {
    pub indep: String,
    pub unknown: String,
    /// The independent invariant in the source variables.
    pub indep_expr: Expr,
    pub order: usize,
    pub residual: Expr,
    /// Factor with `source residual = multiplier · R` under the ansatz.
    pub multiplier: Expr,
    pub change: ChangeOfVariables,
    pub certification: Certification,
    pub independence: Option<Verdict>,
    pub soundness: Option<Verdict>,
}

impl ReducedODE {
    /// A bare ODE in `W(r)` with no source record.
    pub fn new(residual: Expr) -> Self {
        let residual = simplify(&residual);
        ReducedODE {
            indep: "r".into(),
            unknown: "W".into(),
            indep_expr: Expr::sym("r"),
            order: ode_order(&residual, "W", "r"),
            residual,
            multiplier: Expr::one(),
            change: ChangeOfVariables {
                bindings: vec![],
                eliminated: None,
            },
            certification: Certification::Symbolic,
            independence: None,
            soundness: None,
        }
    }

    pub fn jet(&self, k: usize) -> String {
        ode_jet(&self.unknown, &self.indep, k)
    }

    pub fn jet_names(&self) -> Vec<String> {
        (0..=self.order).map(|k| self.jet(k)).collect()
    }
}

impl fmt::Display for ReducedODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.residual)
    }
}

const MAX_ODE_ORDER: usize = 8;

pub(crate) fn ode_order(e: &Expr, unknown: &str, indep: &str) -> usize {
    let names = e.symbols();
    (0..=MAX_ODE_ORDER)
        .rev()
        .find(|&k| names.contains(&ode_jet(unknown, indep, k)))
        .unwrap_or(0)
}

/// Total derivative in `v` of an expression in `(x, t, W, W_r, ...)` where
/// `W` is a function of `r(x, t)`.
fn chain_d(e: &Expr, v: &str, r: &Expr) -> Expr {
    let rv = diff(r, v);
    let mut terms = vec![diff(e, v)];
    if !rv.is_num_zero() {
        for k in 0..MAX_ODE_ORDER {
            let de = diff(e, &ode_jet("W", "r", k));
            if !de.is_num_zero() {
                terms.push(de * rv.clone() * Expr::sym(&ode_jet("W", "r", k + 1)));
            }
        }
    }
    simplify(&Expr::add(terms))
}

/// Elimination of one of `x`, `t` in favour of `r`: `(eliminated, value, leftover)`.
fn elimination(r: &Expr) -> Result<(String, Expr, String), ReduceError> {
    let rs = Expr::sym("r");
    if let Some(s) = r.as_sym() {
        return match s {
            "x" => Ok(("x".into(), rs, "t".into())),
            "t" => Ok(("t".into(), rs, "x".into())),
            _ => Err(ReduceError::UnsupportedInvariantForm(format!("r = {} is not a function of x and t", r))),
        };
    }
    // r = c·x^p·t^q with q ≠ 0: t = (r / (c·x^p))^(1/q).
    let mut q = None;
    let mut rest = Vec::new();
    for f in r.factors() {
        match &f {
            Expr::Sym(s) if s == "t" => q = Some(Expr::one()),
            Expr::Pow(b, e) if b.as_sym() == Some("t") && e.as_num().is_some() => q = Some(e.as_ref().clone()),
            f if f.depends_on("t") => {
                return Err(ReduceError::UnsupportedInvariantForm(format!("cannot solve r = {} for t", r)));
            }
            f => rest.push(f.clone()),
        }
    }
    let rest = Expr::mul(rest);
    match q {
        Some(q) if !rest.symbols().iter().any(|s| s != "x" && !is_param_like(s)) => {
            let t = simplify(&Expr::pow(rs / rest, q.recip()));
            Ok(("t".into(), t, "x".into()))
        }
        _ => Err(ReduceError::UnsupportedInvariantForm(format!("cannot solve r = {} for x or t", r))),
    }
}

fn is_param_like(s: &str) -> bool {
    !matches!(s, "t" | "u" | "r") && parse_jet(s).is_none()
}

/// Reduce the equation under the ansatz `w = W(r)`.
///
/// The leftover variable (`t` for `r = x`, `x` otherwise) is removed
/// symbolically when possible; if it survives, the independence oracle
/// decides between an oracle-certified ODE and [`ReduceError::NotSelfSimilar`].
pub fn reduce(pde: &EvolutionPDE, inv: &InvariantPair, tol: f64, seed: u64) -> Result<ReducedODE, ReduceError> {
    let r = inv.r.clone();
    let (elim, elim_val, leftover) = elimination(&r)?;
    let w0 = Expr::sym("W");
    let u_expr = simplify(&((w0 - inv.b.clone()) / inv.a.clone()));
    let mut bindings: BTreeMap<String, Expr> = BTreeMap::new();
    bindings.insert("u".into(), u_expr.clone());
    for name in jets_in(&pde.delta) {
        let (a, b) = parse_jet(&name).expect("jet name");
        let mut e = u_expr.clone();
        for _ in 0..a {
            e = chain_d(&e, "x", &r);
        }
        for _ in 0..b {
            e = chain_d(&e, "t", &r);
        }
        bindings.insert(name, e);
    }
    let e_xt = expand(&substitute(&pde.delta, &bindings).expect("bindings are acyclic"));
    let order = ode_order(&e_xt, "W", "r");
    let top = ode_jet("W", "r", order);

    let mut elim_map = BTreeMap::new();
    elim_map.insert(elim.clone(), elim_val.clone());
    let e_r = expand(&substitute(&e_xt, &elim_map).expect("acyclic"));

    let wjets: BTreeSet<String> = (0..=MAX_ODE_ORDER).map(|k| ode_jet("W", "r", k)).collect();
    let lead = simplify(&diff(&e_r, &top));
    let mu = simplify(&Expr::mul(
        lead.factors()
            .into_iter()
            .filter(|f| !f.depends_on("r") && !wjets.iter().any(|w| f.depends_on(w)))
            .collect(),
    ));
    let full = expand(&simplify(&(e_r / mu.clone())));

    let params: BTreeSet<String> = full
        .symbols()
        .union(&e_xt.symbols())
        .filter(|s| !matches!(s.as_str(), "x" | "t" | "r") && !wjets.contains(*s))
        .cloned()
        .collect();

    let independence = independence_oracle(&full, &leftover, &params, &wjets, tol, seed)?;
    let (residual, certification) = if !full.depends_on(&leftover) {
        (full.clone(), Certification::Symbolic)
    } else if independence.equivalent {
        let mut m = BTreeMap::new();
        m.insert(leftover.clone(), Expr::one());
        (substitute(&full, &m).expect("acyclic"), Certification::OracleCertified)
    } else {
        let w = independence.witness.clone().unwrap_or_default();
        let (first, second) = split_witness(&w, &leftover);
        return Err(ReduceError::NotSelfSimilar {
            first,
            second,
            detail: format!(
                "R varies with {} at fixed r (scaled difference {:.3e})",
                leftover, independence.max_scaled
            ),
        });
    };

    let soundness = soundness_oracle(&e_xt, &mu, &residual, &r, &params, &wjets, tol, seed)?;
    if !soundness.equivalent {
        return Err(ReduceError::Unsound {
            witness: soundness.witness.clone().unwrap_or_default(),
            detail: format!("scaled deviation {:.3e}", soundness.max_scaled),
        });
    }

    let mut bound: Vec<(String, Expr)> = bindings.into_iter().collect();
    bound.sort_by_key(|(k, _)| if k == "u" { (0, String::new()) } else { (1, k.clone()) });
    Ok(ReducedODE {
        indep: "r".into(),
        unknown: "W".into(),
        indep_expr: r,
        order,
        residual,
        multiplier: mu,
        change: ChangeOfVariables {
            bindings: bound,
            eliminated: Some((elim, elim_val)),
        },
        certification,
        independence: Some(independence),
        soundness: Some(soundness),
    })
}

const LEFT_A: &str = "@first";
const LEFT_B: &str = "@second";

fn split_witness(w: &Assignment, leftover: &str) -> (Assignment, Assignment) {
    let mut a = Assignment::new();
    let mut b = Assignment::new();
    for (k, v) in w.iter() {
        match k.as_str() {
            LEFT_A => a.set(leftover, *v),
            LEFT_B => b.set(leftover, *v),
            _ => {
                a.set(k, *v);
                b.set(k, *v);
            }
        }
    }
    (a, b)
}

fn draw(rng: &mut ChaCha8Rng, bx: &SamplingBox, keys: &BTreeSet<String>, labels: &BTreeSet<String>) -> Assignment {
    bx.sample(keys, labels, rng)
}

/// `R(r, leftover = v1) = R(r, leftover = v2)` at `trials` random
/// configurations with independent `v1`, `v2`.
fn independence_oracle(
    full: &Expr,
    leftover: &str,
    params: &BTreeSet<String>,
    wjets: &BTreeSet<String>,
    tol: f64,
    seed: u64,
) -> Result<Verdict, ReduceError> {
    let mut bx = SamplingBox::with_params(params.iter().cloned());
    bx.params.extend(wjets.iter().cloned());
    let mut keys = full.eval_keys();
    keys.insert("r".into());
    keys.remove(leftover);
    let labels = full.function_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_scaled: f64 = 0.0;
    let mut witness = None;
    for _ in 0..MIN_CONFIGS {
        let mut done = false;
        let mut last = String::new();
        for _ in 0..=bx.retries {
            let mut a = draw(&mut rng, &bx, &keys, &labels);
            let v1 = rng.gen_range(bx.var_lo..=bx.var_hi);
            let v2 = rng.gen_range(bx.var_lo..=bx.var_hi);
            a.set(leftover, v1);
            let e1 = eval_num(full, &a);
            a.set(leftover, v2);
            let e2 = eval_num(full, &a);
            match (e1, e2) {
                (Ok(e1), Ok(e2)) => {
                    let s = (e1 - e2).abs() / (1.0 + e1.abs().max(e2.abs()));
                    if s > max_scaled || witness.is_none() {
                        max_scaled = max_scaled.max(s);
                        a.0.remove(leftover);
                        a.set(LEFT_A, v1);
                        a.set(LEFT_B, v2);
                        witness = Some(a);
                    }
                    done = true;
                    break;
                }
                (Err(EvalError::UnboundSymbol(s)), _) | (_, Err(EvalError::UnboundSymbol(s))) => {
                    return Err(OracleError::Unbound(s).into());
                }
                (Err(EvalError::DomainError(m)), _) | (_, Err(EvalError::DomainError(m))) => last = m,
            }
        }
        if !done {
            return Err(OracleError::SamplingExhausted {
                attempts: bx.retries + 1,
                last,
            }
            .into());
        }
    }
    let equivalent = max_scaled <= tol;
    Ok(Verdict {
        equivalent,
        max_scaled,
        points: MIN_CONFIGS,
        seed,
        tol,
        witness: if equivalent { None } else { witness },
    })
}

const MIN_CONFIGS: usize = 100;

/// `E(x, t) = μ(x, t)·R(r(x, t))` at random `(x, t)` and W-jet values.
#[allow(clippy::too_many_arguments)]
fn soundness_oracle(
    e_xt: &Expr,
    mu: &Expr,
    residual: &Expr,
    r: &Expr,
    params: &BTreeSet<String>,
    wjets: &BTreeSet<String>,
    tol: f64,
    seed: u64,
) -> Result<Verdict, ReduceError> {
    let mut m = BTreeMap::new();
    m.insert("r".to_string(), r.clone());
    let rhs = substitute(&(mu.clone() * residual.clone()), &m).expect("acyclic");
    let mut bx = SamplingBox::with_params(params.iter().cloned());
    bx.params.extend(wjets.iter().cloned());
    Ok(bx.equiv(e_xt, &rhs, MIN_CONFIGS, tol, seed.wrapping_add(1))?)
}

/// Solve both ODEs for the jet `top` and compare the solutions with the
/// oracle. Each residual must be affine in `top`.
pub fn compare_reduced(a: &Expr, b: &Expr, top: &str, tol: f64, seed: u64) -> Result<Verdict, ReduceError> {
    let solve = |e: &Expr| -> Result<Expr, ReduceError> {
        let c = simplify(&diff(e, top));
        if c.depends_on(top) || c.is_num_zero() {
            return Err(ReduceError::UnsupportedInvariantForm(format!("{} is not affine in {}", e, top)));
        }
        let mut m = BTreeMap::new();
        m.insert(top.to_string(), Expr::zero());
        let rest = substitute(e, &m).expect("acyclic");
        Ok(simplify(&(-rest / c)))
    };
    let (sa, sb) = (solve(a)?, solve(b)?);
    let names: BTreeSet<String> = sa.symbols().union(&sb.symbols()).cloned().collect();
    let bx = SamplingBox::with_params(names.into_iter().filter(|s| s != "r"));
    Ok(bx.equiv(&sa, &sb, MIN_CONFIGS, tol, seed)?)
}
