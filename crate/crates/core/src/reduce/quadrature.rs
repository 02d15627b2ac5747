use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reduction::ReducedODE;
use super::ReduceError;
use crate::expr::{diff, eval_num, instantiate, simplify, substitute, Assignment, Expr, FnSym, SamplingBox, Verdict};

/// Implicit solution `indep - ∫^unknown integrand(dummy) d(dummy) + constant = 0`.
/// The integral is formal and never evaluated symbolically.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub indep: String,
    pub unknown: String,
    pub dummy: String,
    pub constant: String,
    pub integrand: Expr,
    /// Set when the integrand is constant, so the integral is elementary.
    pub closed_form: Option<Expr>,
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.closed_form {
            Some(e) => write!(f, "{} = 0", e),
            None => write!(
                f,
                "{} - ∫^{} ({}) d{} + {} = 0",
                self.indep, self.unknown, self.integrand, self.dummy, self.constant
            ),
        }
    }
}

/// Split a first-order residual into `α(W)·W' + β(W)`.
fn affine_split(ode: &ReducedODE) -> Result<(Expr, Expr), ReduceError> {
    if ode.order != 1 {
        return Err(ReduceError::NotSeparable(format!("order {} is not 1", ode.order)));
    }
    if ode.residual.depends_on(&ode.indep) {
        return Err(ReduceError::NotSeparable(format!("{} depends on {}", ode.residual, ode.indep)));
    }
    let wp = ode.jet(1);
    let alpha = simplify(&diff(&ode.residual, &wp));
    if alpha.depends_on(&wp) {
        return Err(ReduceError::NotSeparable(format!("{} is not affine in {}", ode.residual, wp)));
    }
    let mut m = BTreeMap::new();
    m.insert(wp, Expr::zero());
    let beta = substitute(&ode.residual, &m).expect("acyclic");
    if beta.is_num_zero() {
        return Err(ReduceError::NotSeparable("no term free of the derivative".into()));
    }
    Ok((alpha, beta))
}

/// `W' = -β(W)/α(W)` integrates to `r - ∫^W -α/β dc1 + c2 = 0`.
pub fn separable_solve(ode: &ReducedODE) -> Result<Quadrature, ReduceError> {
    let (alpha, beta) = affine_split(ode)?;
    let mut m = BTreeMap::new();
    m.insert(ode.jet(0), Expr::sym("c1"));
    let integrand = substitute(&(-alpha / beta), &m).expect("acyclic");
    let closed_form = (!integrand.depends_on("c1")).then(|| {
        simplify(&(Expr::sym(&ode.indep) - integrand.clone() * Expr::sym(&ode.jet(0)) + Expr::sym("c2")))
    });
    Ok(Quadrature {
        indep: ode.indep.clone(),
        unknown: ode.unknown.clone(),
        dummy: "c1".into(),
        constant: "c2".into(),
        integrand,
        closed_form,
    })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 30)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return f64::NAN;
    }
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Replace each unknown function `F(s1, ..)` by `1 + s1^2 + ..`, positive on
/// any box.
fn concretize(e: &Expr) -> Expr {
    let mut fns: BTreeMap<String, Vec<String>> = BTreeMap::new();
    e.visit(&mut |n| {
        if let Expr::Fn(FnSym { name, slots, .. }) = n {
            fns.entry(name.clone()).or_insert_with(|| slots.clone());
        }
    });
    let mut out = e.clone();
    for (name, slots) in fns {
        let body = Expr::add(
            std::iter::once(Expr::one())
                .chain(slots.iter().map(|s| Expr::powi(Expr::sym(s), 2)))
                .collect(),
        );
        let params: Vec<&str> = slots.iter().map(String::as_str).collect();
        out = instantiate(&out, &name, &params, &body);
    }
    out
}

const QUAD_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-2;

impl Quadrature {
    /// Implicit differentiation check against `ode`: unknown functions are
    /// made concrete, `dr/dW` is taken by a fourth-order central difference
    /// of the numerically integrated relation, and `α·W' + β` must vanish.
    pub fn verify(&self, ode: &ReducedODE, trials: usize, tol: f64, seed: u64) -> Result<Verdict, ReduceError> {
        let (alpha, beta) = affine_split(ode)?;
        let g = concretize(&self.integrand);
        let (alpha, beta) = (concretize(&alpha), concretize(&beta));
        let w = ode.jet(0);
        let mut keys = g.eval_keys();
        keys.extend(alpha.eval_keys());
        keys.extend(beta.eval_keys());
        keys.remove(&self.dummy);
        keys.remove(&w);
        let bx = SamplingBox::with_params(keys.iter().cloned());
        let labels = Default::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_scaled: f64 = 0.0;
        let mut witness: Option<Assignment> = None;
        let mut done = 0;
        let mut attempts = 0;
        while done < trials {
            attempts += 1;
            if attempts > trials * (bx.retries + 1) {
                return Err(crate::expr::OracleError::SamplingExhausted {
                    attempts,
                    last: "integrand not finite".into(),
                }
                .into());
            }
            let mut a = bx.sample(&keys, &labels, &mut rng);
            let wv = rng.gen_range(bx.var_lo..=bx.var_hi);
            let gf = |c: f64| {
                let mut p = a.clone();
                p.set(&self.dummy, c);
                eval_num(&g, &p).unwrap_or(f64::NAN)
            };
            let i1 = adaptive_simpson(&gf, wv - FD_STEP, wv + FD_STEP, QUAD_TOL);
            let i2 = adaptive_simpson(&gf, wv - 2.0 * FD_STEP, wv + 2.0 * FD_STEP, QUAD_TOL);
            let dr_dw = (8.0 * i1 - i2) / (12.0 * FD_STEP);
            a.set(&w, wv);
            let (av, bv) = match (eval_num(&alpha, &a), eval_num(&beta, &a)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => continue,
            };
            if !dr_dw.is_finite() || dr_dw == 0.0 || !av.is_finite() || !bv.is_finite() {
                continue;
            }
            let lhs = av / dr_dw;
            let scaled = (lhs + bv).abs() / (1.0 + lhs.abs().max(bv.abs()));
            if scaled > max_scaled || witness.is_none() {
                max_scaled = max_scaled.max(scaled);
                witness = Some(a);
            }
            done += 1;
        }
        let equivalent = max_scaled <= tol;
        Ok(Verdict {
            equivalent,
            max_scaled,
            points: trials,
            seed,
            tol,
            witness: if equivalent { None } else { witness },
        })
    }
}
