//! Problem files: a JSON document describing one equation and the candidate
//! generators, invariants and ansatz bases to check against it.
//!
//! ```json
//! {
//!   "name": "B",
//!   "form": "grdc",
//!   "f": "a*x^4*u", "h": "b*x/u", "k": "x*u",
//!   "params": [{"symbol": "a", "nonzero": true}, {"symbol": "b"}],
//!   "generators": [{"xi": "x", "eta": "-t", "phi": "-u"}],
//!   "invariants": [{"r": "x*t", "w": "x*u"}],
//!   "bases": {"xi": ["1", "x"], "eta": ["1", "t"], "phi": ["u"]}
//! }
//! ```
//!
//! In `grdc` form a missing `f`, `h` or `k` (or one given as its own name)
//! stands for an arbitrary function of `(x, u)`. `evolution` form takes the
//! right-hand side `rhs` of `u_t = rhs` directly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parse::{parse_in, ParseError, Scope};
use crate::expr::Expr;
use crate::jet::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Grdc,
    Evolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub symbol: String,
    #[serde(default)]
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub xi: String,
    pub eta: String,
    pub phi: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantSpec {
    pub r: String,
    pub w: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bases {
    #[serde(default)]
    pub xi: Vec<String>,
    #[serde(default)]
    pub eta: Vec<String>,
    #[serde(default)]
    pub phi: Vec<String>,
}

/// The document as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub form: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub invariants: Vec<InvariantSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Bases>,
}

/// A validated problem with every expression parsed.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub form: Form,
    /// `f`, `h`, `k` in grdc form.
    pub fhk: Option<[Expr; 3]>,
    /// Right-hand side in evolution form.
    pub rhs: Option<Expr>,
    pub params: Vec<ParamSpec>,
    pub generators: Vec<VectorField>,
    pub invariants: Vec<(Expr, Expr)>,
    pub bases: Option<[Vec<Expr>; 3]>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("schema error at `{path}`: {msg}")]
    Schema { path: String, msg: String },
    #[error("syntax error in `{path}`: {source}")]
    Syntax { path: String, source: ParseError },
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem, ProblemError> {
    let p = path.as_ref();
    let text = fs::read_to_string(p).map_err(|e| ProblemError::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_problem(&text)
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ProblemError::Schema {
            path,
            msg: e.into_inner().to_string(),
        }
    })?;
    file.validate()
}

impl ProblemFile {
    pub fn validate(&self) -> Result<Problem, ProblemError> {
        let mut scope = Scope::strict(self.params.iter().map(|p| p.symbol.clone()));
        let mut seen = std::collections::BTreeSet::new();
        for (i, p) in self.params.iter().enumerate() {
            let reserved = ["x", "t", "u", "exp", "ln", "sqrt"];
            if reserved.contains(&p.symbol.as_str()) || !seen.insert(p.symbol.clone()) {
                return Err(schema(&format!("params[{}].symbol", i), format!("`{}` cannot be a parameter", p.symbol)));
            }
        }
        let ex = |scope: &Scope, path: &str, src: &str| parse_checked(scope, path, src);
        let (fhk, rhs) = match self.form {
            Form::Grdc => {
                if self.rhs.is_some() {
                    return Err(schema("rhs", "`rhs` is only valid in evolution form"));
                }
                let mut out = Vec::new();
                for (name, src) in [("f", &self.f), ("h", &self.h), ("k", &self.k)] {
                    let e = match src.as_deref().map(str::trim) {
                        None => Expr::func(name, &["x", "u"]),
                        Some(s) if s == name => Expr::func(name, &["x", "u"]),
                        Some(s) => {
                            let e = ex(&scope, name, s)?;
                            for bad in std::iter::once("t".to_string()).chain(crate::jet::all_jet_names(3)) {
                                if e.depends_on(&bad) {
                                    return Err(schema(name, format!("`{}` may depend only on x and u, found `{}`", name, bad)));
                                }
                            }
                            e
                        }
                    };
                    out.push(e);
                }
                let [f, h, k]: [Expr; 3] = out.try_into().unwrap();
                (Some([f, h, k]), None)
            }
            Form::Evolution => {
                for (name, v) in [("f", &self.f), ("h", &self.h), ("k", &self.k)] {
                    if v.is_some() {
                        return Err(schema(name, format!("`{}` is only valid in grdc form", name)));
                    }
                }
                let src = self.rhs.as_deref().ok_or_else(|| schema("rhs", "evolution form requires `rhs`"))?;
                (None, Some(ex(&scope, "rhs", src)?))
            }
        };
        // Generators, invariants and bases live on (x, t, u) only.
        scope = restrict_to_base(scope);
        let mut generators = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let p = |c: &str| format!("generators[{}].{}", i, c);
            generators.push(VectorField::new(
                ex(&scope, &p("xi"), &g.xi)?,
                ex(&scope, &p("eta"), &g.eta)?,
                ex(&scope, &p("phi"), &g.phi)?,
            ));
        }
        let mut invariants = Vec::new();
        for (i, inv) in self.invariants.iter().enumerate() {
            invariants.push((
                ex(&scope, &format!("invariants[{}].r", i), &inv.r)?,
                ex(&scope, &format!("invariants[{}].w", i), &inv.w)?,
            ));
        }
        let bases = match &self.bases {
            None => None,
            Some(b) => {
                let mut parsed: [Vec<Expr>; 3] = Default::default();
                for (slot, (key, list)) in [("xi", &b.xi), ("eta", &b.eta), ("phi", &b.phi)].into_iter().enumerate() {
                    for (i, s) in list.iter().enumerate() {
                        parsed[slot].push(ex(&scope, &format!("bases.{}[{}]", key, i), s)?);
                    }
                }
                Some(parsed)
            }
        };
        Ok(Problem {
            name: self.name.clone(),
            form: self.form,
            fhk,
            rhs,
            params: self.params.clone(),
            generators,
            invariants,
            bases,
        })
    }
}

impl Problem {
    /// Scope for user-supplied fields and invariants: `x`, `t`, `u` and the
    /// declared parameters.
    pub fn field_scope(&self) -> Scope {
        restrict_to_base(Scope::strict(self.params.iter().map(|p| p.symbol.clone())))
    }
}

fn schema(path: &str, msg: impl Into<String>) -> ProblemError {
    ProblemError::Schema {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn parse_checked(scope: &Scope, path: &str, src: &str) -> Result<Expr, ProblemError> {
    let e = parse_in(src, scope).map_err(|err| match err {
        ParseError::UnknownIdentifier { name, .. } => schema(path, format!("undeclared symbol `{}`", name)),
        other => ProblemError::Syntax {
            path: path.to_string(),
            source: other,
        },
    })?;
    if let Some(bad) = scope.forbidden().iter().find(|j| e.depends_on(j)) {
        return Err(schema(path, format!("`{}` is not allowed here", bad)));
    }
    Ok(e)
}

fn restrict_to_base(mut scope: Scope) -> Scope {
    scope.forbid(crate::jet::all_jet_names(3));
    scope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_equation() {
        let p = parse_problem(r#"{"name": "heat", "form": "grdc", "f": "1", "h": "0", "k": "0"}"#).unwrap();
        let [f, h, k] = p.fhk.unwrap();
        assert_eq!((f, h, k), (Expr::one(), Expr::zero(), Expr::zero()));
    }

    #[test]
    fn missing_functions_are_unknown() {
        let p = parse_problem(r#"{"name": "g", "form": "grdc", "k": "k"}"#).unwrap();
        let [f, _, k] = p.fhk.unwrap();
        assert_eq!(f, Expr::func("f", &["x", "u"]));
        assert_eq!(k, Expr::func("k", &["x", "u"]));
    }

    #[test]
    fn undeclared_symbol_named() {
        let err = parse_problem(r#"{"name": "z", "form": "grdc", "f": "z*u", "h": "0", "k": "0"}"#).unwrap_err();
        match err {
            ProblemError::Schema { path, msg } => {
                assert_eq!(path, "f");
                assert!(msg.contains("`z`"));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_problem(r#"{"name": "n", "form": "grdc", "g": "1"}"#).unwrap_err();
        assert!(matches!(err, ProblemError::Schema { .. }), "{:?}", err);
        let err = parse_problem(r#"{"name": "n", "form": "grdc", "params": [{"symbol": "a", "zero": true}]}"#)
            .unwrap_err();
        match err {
            ProblemError::Schema { path, .. } => assert!(path.starts_with("params[0]"), "{}", path),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_problem(r#"{"name": "n", "form": "evolution", "rhs": "u_xx +* u"}"#).unwrap_err();
        match err {
            ProblemError::Syntax { path, source: ParseError::Syntax { col, .. } } => {
                assert_eq!(path, "rhs");
                assert_eq!(col, 7);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn generator_with_jet_rejected() {
        let err = parse_problem(
            r#"{"name": "n", "form": "grdc", "generators": [{"xi": "u_x", "eta": "0", "phi": "0"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::Schema { .. }));
    }

    #[test]
    fn t_dependence_rejected_in_grdc() {
        assert!(parse_problem(r#"{"name": "n", "form": "grdc", "f": "t*u"}"#).is_err());
    }
}
