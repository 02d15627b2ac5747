use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Expr;

/// Values for the free names of an expression: symbols, jet coordinates and
/// unknown-function labels such as `f_xu`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Assignment(pub BTreeMap<String, f64>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {0}")]
    DomainError(String),
}

/// Evaluate in IEEE double precision. Unknown-function nodes are looked up by
/// label, as independent coordinates.
pub fn eval_num(e: &Expr, a: &Assignment) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(n) => n.to_f64(),
        Expr::Sym(s) => a.get(s).ok_or_else(|| EvalError::UnboundSymbol(s.clone()))?,
        Expr::Fn(f) => {
            let label = f.label();
            a.get(&label).ok_or(EvalError::UnboundSymbol(label))?
        }
        Expr::Add(v) => {
            let mut s = 0.0;
            for t in v {
                s += eval_num(t, a)?;
            }
            s
        }
        Expr::Mul(v) => {
            let mut p = 1.0;
            for t in v {
                p *= eval_num(t, a)?;
            }
            p
        }
        Expr::Pow(b, x) => {
            let base = eval_num(b, a)?;
            match x.as_num().and_then(|n| n.as_i64()) {
                Some(n) => {
                    if base == 0.0 && n < 0 {
                        return Err(EvalError::DomainError(format!("division by zero in `{}`", e)));
                    }
                    if let Ok(n32) = i32::try_from(n) {
                        base.powi(n32)
                    } else {
                        base.powf(n as f64)
                    }
                }
                None => {
                    let ex = eval_num(x, a)?;
                    if base < 0.0 || (base == 0.0 && ex < 0.0) {
                        return Err(EvalError::DomainError(format!(
                            "{}^{} is not real",
                            base, ex
                        )));
                    }
                    base.powf(ex)
                }
            }
        }
        Expr::Exp(x) => eval_num(x, a)?.exp(),
        Expr::Ln(x) => {
            let v = eval_num(x, a)?;
            if v <= 0.0 {
                return Err(EvalError::DomainError(format!("ln of non-positive value {}", v)));
            }
            v.ln()
        }
        Expr::Sqrt(x) => {
            let v = eval_num(x, a)?;
            if v < 0.0 {
                return Err(EvalError::DomainError(format!("sqrt of negative value {}", v)));
            }
            v.sqrt()
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::DomainError(format!("non-finite value in `{}`", e)))
    }
}
