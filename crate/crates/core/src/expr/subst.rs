use std::collections::BTreeMap;

use thiserror::Error;

use super::{diff, simplify, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("cyclic binding: replacement for `{bound}` mentions bound name `{mentioned}`")]
    CyclicBinding { bound: String, mentioned: String },
}

/// Simultaneous substitution followed by `simplify`.
///
/// Keys are symbol names or unknown-function labels (`f_u`); a label key
/// matches a function node applied to its own slot symbols. Replacements must
/// not mention any bound name.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Result<Expr, SubstError> {
    for (k, v) in bindings {
        if let Some(m) = v.free_names().into_iter().find(|n| bindings.contains_key(n)) {
            return Err(SubstError::CyclicBinding {
                bound: k.clone(),
                mentioned: m,
            });
        }
    }
    Ok(simplify(&subst_raw(e, bindings)))
}

pub(crate) fn subst_raw(e: &Expr, b: &BTreeMap<String, Expr>) -> Expr {
    if b.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Sym(n) => b.get(n).cloned().unwrap_or_else(|| e.clone()),
        Expr::Fn(f) => {
            if f.has_default_args() {
                if let Some(v) = b.get(&f.label()) {
                    return v.clone();
                }
            }
            e.map_children(|c| subst_raw(c, b))
        }
        _ => e.map_children(|c| subst_raw(c, b)),
    }
}

/// Replace the unknown function `name` by a concrete `body` written in the
/// variables `params` (positionally matched to the function's slots).
/// Derivative nodes become the corresponding derivatives of `body`.
pub fn instantiate(e: &Expr, name: &str, params: &[&str], body: &Expr) -> Expr {
    let mut cache: BTreeMap<Vec<u32>, Expr> = BTreeMap::new();
    simplify(&inst(e, name, params, body, &mut cache))
}

fn inst(
    e: &Expr,
    name: &str,
    params: &[&str],
    body: &Expr,
    cache: &mut BTreeMap<Vec<u32>, Expr>,
) -> Expr {
    match e {
        Expr::Fn(f) if f.name == name && f.d.len() == params.len() => {
            let derived = cache
                .entry(f.d.clone())
                .or_insert_with(|| {
                    let mut g = body.clone();
                    for (i, &n) in f.d.iter().enumerate() {
                        for _ in 0..n {
                            g = diff(&g, params[i]);
                        }
                    }
                    g
                })
                .clone();
            let args: Vec<Expr> = f.args.iter().map(|a| inst(a, name, params, body, cache)).collect();
            let map: BTreeMap<String, Expr> = params
                .iter()
                .zip(args)
                .filter(|(p, a)| a.as_sym() != Some(**p))
                .map(|(p, a)| (p.to_string(), a))
                .collect();
            subst_raw(&derived, &map)
        }
        _ => e.map_children(|c| inst(c, name, params, body, cache)),
    }
}
