//! Random-point equivalence oracle.
//!
//! Two expressions are declared equivalent when
//! `|e1 - e2| <= tol * (1 + max(|e1|, |e2|))` at every sampled point.
//! Sampling is deterministic given the seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simplify::split_coeff;
use super::{eval_num, expand, Assignment, EvalError, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("sampling exhausted: no valid point after {attempts} attempts ({last})")]
    SamplingExhausted { attempts: usize, last: String },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
}

/// Where sample points are drawn from.
///
/// Variables are drawn uniformly from `[var_lo, var_hi]`. Names listed in
/// `params`, and every unknown-function label, are drawn from
/// `[-param_hi, -param_lo] ∪ [param_lo, param_hi]`. Names in `fixed` keep
/// their given value.
#[derive(Clone, Debug)]
pub struct SamplingBox {
    pub var_lo: f64,
    pub var_hi: f64,
    pub param_lo: f64,
    pub param_hi: f64,
    pub params: BTreeSet<String>,
    pub fixed: Assignment,
    /// Re-draws allowed per point when evaluation hits a domain error.
    pub retries: usize,
}

impl Default for SamplingBox {
    fn default() -> Self {
        SamplingBox {
            var_lo: 0.2,
            var_hi: 2.0,
            param_lo: 0.2,
            param_hi: 2.0,
            params: BTreeSet::new(),
            fixed: Assignment::new(),
            retries: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub equivalent: bool,
    pub max_scaled: f64,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    /// The worst sampled point, reported when the verdict is negative.
    pub witness: Option<Assignment>,
}

impl SamplingBox {
    pub fn with_params<I, S>(params: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SamplingBox {
            params: params.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Draw one point for the given names.
    pub fn sample(&self, keys: &BTreeSet<String>, fn_labels: &BTreeSet<String>, rng: &mut impl Rng) -> Assignment {
        let mut a = Assignment::new();
        for k in keys {
            if let Some(v) = self.fixed.get(k) {
                a.set(k, v);
                continue;
            }
            let v = if self.params.contains(k) || fn_labels.contains(k) {
                let m = rng.gen_range(self.param_lo..=self.param_hi);
                if rng.gen_bool(0.5) {
                    m
                } else {
                    -m
                }
            } else {
                rng.gen_range(self.var_lo..=self.var_hi)
            };
            a.set(k, v);
        }
        a
    }

    /// Evaluate all `exprs` at `trials` valid points, calling `check` on each
    /// tuple of values. Points where any expression hits a domain error are
    /// re-drawn up to `retries` times.
    pub fn for_each_point(
        &self,
        exprs: &[&Expr],
        trials: usize,
        seed: u64,
        mut check: impl FnMut(&Assignment, &[f64]),
    ) -> Result<(), OracleError> {
        let mut keys = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for e in exprs {
            keys.extend(e.eval_keys());
            labels.extend(e.function_labels());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut last = String::new();
            let mut ok = false;
            for _ in 0..=self.retries {
                let a = self.sample(&keys, &labels, &mut rng);
                let vals: Result<Vec<f64>, EvalError> = exprs.iter().map(|e| eval_num(e, &a)).collect();
                match vals {
                    Ok(v) => {
                        check(&a, &v);
                        ok = true;
                        break;
                    }
                    Err(EvalError::UnboundSymbol(s)) => return Err(OracleError::Unbound(s)),
                    Err(EvalError::DomainError(m)) => last = m,
                }
            }
            if !ok {
                return Err(OracleError::SamplingExhausted {
                    attempts: self.retries + 1,
                    last,
                });
            }
        }
        Ok(())
    }

    pub fn equiv(&self, e1: &Expr, e2: &Expr, trials: usize, tol: f64, seed: u64) -> Result<Verdict, OracleError> {
        let mut max_scaled: f64 = 0.0;
        let mut witness = None;
        self.for_each_point(&[e1, e2], trials, seed, |a, v| {
            let scaled = (v[0] - v[1]).abs() / (1.0 + v[0].abs().max(v[1].abs()));
            if scaled > max_scaled || witness.is_none() {
                max_scaled = max_scaled.max(scaled);
                witness = Some(a.clone());
            }
        })?;
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

    /// Oracle test that `e` vanishes: the expanded terms are split by the sign
    /// of their numeric coefficient and the two halves compared, so the scale
    /// is that of the largest cancelling part.
    pub fn vanishes(&self, e: &Expr, trials: usize, tol: f64, seed: u64) -> Result<Verdict, OracleError> {
        let (pos, neg) = split_by_sign(&expand(e));
        self.equiv(&pos, &neg, trials, tol, seed)
    }
}

impl SamplingBox {
    /// Equivalence of `e1` and `c·e2` for a small-denominator rational `c`
    /// fitted at the first point where `e2` is not tiny. Returns `c` with the
    /// verdict, or `None` when no such constant fits.
    pub fn equiv_up_to_constant(
        &self,
        e1: &Expr,
        e2: &Expr,
        trials: usize,
        tol: f64,
        seed: u64,
    ) -> Result<Option<(super::Number, Verdict)>, OracleError> {
        let mut ratio = None;
        self.for_each_point(&[e1, e2], 16, seed ^ 0x5eed, |_, v| {
            if ratio.is_none() && v[1].abs() > 1e-6 {
                ratio = Some(v[0] / v[1]);
            }
        })?;
        let c = match ratio.and_then(|r| super::Number::rationalize(r, 64, 1e-7)) {
            Some(c) if !c.is_zero() => c,
            _ => return Ok(None),
        };
        let scaled = super::simplify(&(Expr::Num(c.clone()) * e2.clone()));
        let v = self.equiv(e1, &scaled, trials, tol, seed)?;
        Ok(Some((c, v)))
    }
}

/// `e = pos - neg` with every term of `pos` and `neg` having a positive
/// numeric coefficient.
pub(crate) fn split_by_sign(e: &Expr) -> (Expr, Expr) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for t in e.terms() {
        let (c, _) = split_coeff(&t);
        if c.is_negative() {
            neg.push(Expr::int(-1) * t);
        } else {
            pos.push(t);
        }
    }
    (crate::expr::simplify(&Expr::add(pos)), crate::expr::simplify(&Expr::add(neg)))
}

/// [`SamplingBox::equiv`] over the default box.
pub fn equiv_oracle(e1: &Expr, e2: &Expr, trials: usize, tol: f64, seed: u64) -> Result<Verdict, OracleError> {
    SamplingBox::default().equiv(e1, e2, trials, tol, seed)
}

/// [`SamplingBox::vanishes`] over the default box.
pub fn residual_oracle(e: &Expr, trials: usize, tol: f64, seed: u64) -> Result<Verdict, OracleError> {
    SamplingBox::default().vanishes(e, trials, tol, seed)
}
