//! Tagged-node JSON encoding of expressions.
//!
//! ```text
//! {"num": 3}            integer or float literal
//! {"rat": "3/4"}        exact rational
//! {"sym": "x"}
//! {"fn": "f", "args": ["x", "u"], "d": [1, 1]}
//! {"sum": [..]}  {"prod": [..]}  {"pow": [base, exponent]}
//! {"exp": node}  {"ln": node}  {"sqrt": node}
//! ```
//!
//! Function arguments that are plain symbols are written as bare strings.
//! `slots` is written only when it differs from the argument names.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::expr::{Expr, FnSym, Number};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed document at {path}: {msg}")]
pub struct MalformedDocument {
    pub path: String,
    pub msg: String,
}

fn bad(path: &str, msg: impl Into<String>) -> MalformedDocument {
    MalformedDocument {
        path: if path.is_empty() { "$".into() } else { path.into() },
        msg: msg.into(),
    }
}

pub fn serialize(e: &Expr) -> Value {
    match e {
        Expr::Num(Number::Rat(r)) => {
            if r.is_integer() {
                if let Ok(i) = i64::try_from(r.numer().clone()) {
                    return json!({ "num": i });
                }
            }
            json!({ "rat": r.to_string() })
        }
        Expr::Num(Number::Float(x)) => json!({ "num": x }),
        Expr::Sym(s) => json!({ "sym": s }),
        Expr::Fn(f) => {
            let mut m = Map::new();
            m.insert("fn".into(), json!(f.name));
            let args: Vec<Value> = f
                .args
                .iter()
                .map(|a| match a {
                    Expr::Sym(s) => json!(s),
                    other => serialize(other),
                })
                .collect();
            m.insert("args".into(), Value::Array(args));
            m.insert("d".into(), json!(f.d));
            let default_slots = f
                .args
                .iter()
                .map(|a| a.as_sym())
                .eq(f.slots.iter().map(|s| Some(s.as_str())));
            if !default_slots {
                m.insert("slots".into(), json!(f.slots));
            }
            Value::Object(m)
        }
        Expr::Add(v) => json!({ "sum": v.iter().map(serialize).collect::<Vec<_>>() }),
        Expr::Mul(v) => json!({ "prod": v.iter().map(serialize).collect::<Vec<_>>() }),
        Expr::Pow(b, x) => json!({ "pow": [serialize(b), serialize(x)] }),
        Expr::Exp(a) => json!({ "exp": serialize(a) }),
        Expr::Ln(a) => json!({ "ln": serialize(a) }),
        Expr::Sqrt(a) => json!({ "sqrt": serialize(a) }),
    }
}

pub fn deserialize(v: &Value) -> Result<Expr, MalformedDocument> {
    node(v, "")
}

pub fn to_json(e: &Expr) -> String {
    serialize(e).to_string()
}

pub fn from_json(s: &str) -> Result<Expr, MalformedDocument> {
    let v: Value = serde_json::from_str(s).map_err(|e| bad("", e.to_string()))?;
    deserialize(&v)
}

fn node(v: &Value, path: &str) -> Result<Expr, MalformedDocument> {
    let obj = v.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    let tag = ["num", "rat", "sym", "fn", "sum", "prod", "pow", "exp", "ln", "sqrt"]
        .into_iter()
        .find(|t| obj.contains_key(*t))
        .ok_or_else(|| bad(path, "no node tag"))?;
    let allowed: &[&str] = if tag == "fn" { &["fn", "args", "d", "slots"] } else { &[tag] };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(path, format!("unexpected key `{}`", k)));
    }
    let here = format!("{}.{}", path, tag);
    let body = &obj[tag];
    let list = |b: &Value| -> Result<Vec<Expr>, MalformedDocument> {
        let arr = b.as_array().ok_or_else(|| bad(&here, "expected an array"))?;
        arr.iter()
            .enumerate()
            .map(|(i, c)| node(c, &format!("{}[{}]", here, i)))
            .collect()
    };
    let unary = |b: &Value| node(b, &here).map(Box::new);
    Ok(match tag {
        "num" => {
            let n = body.as_number().ok_or_else(|| bad(&here, "expected a number"))?;
            if let Some(i) = n.as_i64() {
                Expr::int(i)
            } else if n.is_f64() {
                Expr::float(n.as_f64().unwrap())
            } else {
                let big: BigInt = n.to_string().parse().map_err(|_| bad(&here, "bad integer"))?;
                Expr::Num(Number::Rat(BigRational::from_integer(big)))
            }
        }
        "rat" => {
            let s = body.as_str().ok_or_else(|| bad(&here, "expected a string"))?;
            let r = parse_rational(s).ok_or_else(|| bad(&here, format!("bad rational `{}`", s)))?;
            Expr::Num(Number::Rat(r))
        }
        "sym" => Expr::sym(body.as_str().ok_or_else(|| bad(&here, "expected a string"))?),
        "fn" => {
            let name = body.as_str().ok_or_else(|| bad(&here, "expected a string"))?;
            let args_v = obj
                .get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(path, "function node needs an `args` array"))?;
            let mut args = Vec::new();
            for (i, a) in args_v.iter().enumerate() {
                args.push(match a {
                    Value::String(s) => Expr::sym(s),
                    other => node(other, &format!("{}.args[{}]", path, i))?,
                });
            }
            let slots: Vec<String> = match obj.get("slots") {
                Some(s) => serde_json::from_value(s.clone()).map_err(|e| bad(&format!("{}.slots", path), e.to_string()))?,
                None => args
                    .iter()
                    .map(|a| a.as_sym().map(str::to_string))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad(path, "`slots` required when arguments are not plain symbols"))?,
            };
            let d: Vec<u32> = match obj.get("d") {
                Some(d) => serde_json::from_value(d.clone()).map_err(|e| bad(&format!("{}.d", path), e.to_string()))?,
                None => vec![0; slots.len()],
            };
            if slots.len() != args.len() || d.len() != args.len() {
                return Err(bad(path, "`args`, `slots` and `d` lengths differ"));
            }
            Expr::Fn(FnSym {
                name: name.to_string(),
                slots,
                d,
                args,
            })
        }
        "sum" => Expr::Add(list(body)?),
        "prod" => Expr::Mul(list(body)?),
        "pow" => {
            let v = list(body)?;
            if v.len() != 2 {
                return Err(bad(&here, "power needs exactly two operands"));
            }
            let mut it = v.into_iter();
            Expr::pow(it.next().unwrap(), it.next().unwrap())
        }
        "exp" => Expr::Exp(unary(body)?),
        "ln" => Expr::Ln(unary(body)?),
        _ => Expr::Sqrt(unary(body)?),
    })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}
