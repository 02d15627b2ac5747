use std::collections::BTreeSet;

use super::DeterminingError;
use crate::expr::{expand, is_zero, simplify, Expr};
use crate::jet::{self, JetContext};
use crate::lang::{Form, Problem};

/// Names declared nonzero or identically zero: parameters and the functions
/// `f`, `h`, `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    pub nonzero: BTreeSet<String>,
    pub zero: BTreeSet<String>,
}

impl Assumptions {
    pub fn is_nonzero(&self, name: &str) -> bool {
        self.nonzero.contains(name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Grdc { f: Expr, h: Expr, k: Expr },
    Rhs,
}

/// `Δ = u_t − rhs(x, t, u, u_x, u_xx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionPDE {
    pub name: String,
    pub rhs: Expr,
    pub delta: Expr,
    /// Parameter symbols, in declaration order.
    pub params: Vec<String>,
    pub assumptions: Assumptions,
    pub provenance: Provenance,
}

impl EvolutionPDE {
    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_params<I, S>(mut self, params: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        for (p, nonzero) in params {
            let p = p.into();
            if nonzero {
                self.assumptions.nonzero.insert(p.clone());
            }
            if !self.params.contains(&p) {
                self.params.push(p);
            }
        }
        self
    }

    pub fn assume_nonzero(mut self, name: &str) -> Self {
        self.assumptions.nonzero.insert(name.to_string());
        self
    }

    pub fn assume_zero(mut self, name: &str) -> Self {
        self.assumptions.zero.insert(name.to_string());
        self
    }

    /// Build from a validated problem. In grdc form `f != 0` is assumed
    /// unless `f` is identically zero, in which case `f == 0` is recorded.
    pub fn from_problem(p: &Problem) -> Result<Self, DeterminingError> {
        let pde = match p.form {
            Form::Grdc => {
                let [f, h, k] = p.fhk.clone().expect("grdc problem carries f, h, k");
                let f_zero = is_zero(&f);
                let pde = build_grdc(f, h, k)?;
                if f_zero {
                    pde.assume_zero("f")
                } else {
                    pde.assume_nonzero("f")
                }
            }
            Form::Evolution => build_evolution(p.rhs.clone().expect("evolution problem carries rhs"))?,
        };
        Ok(pde
            .with_name(&p.name)
            .with_params(p.params.iter().map(|s| (s.symbol.clone(), s.nonzero))))
    }
}

/// `u_t = (f u_x)_x + h u_x + k` with `f`, `h`, `k` functions of `(x, u)`.
pub fn build_grdc(f: Expr, h: Expr, k: Expr) -> Result<EvolutionPDE, DeterminingError> {
    for (name, e) in [("f", &f), ("h", &h), ("k", &k)] {
        let mut bad = vec!["t".to_string()];
        bad.extend(jet::all_jet_names(3));
        if let Some(s) = bad.into_iter().find(|s| e.depends_on(s)) {
            return Err(DeterminingError::IllegalDependence {
                component: name.to_string(),
                symbol: s,
            });
        }
    }
    let ctx = JetContext::default();
    let ux = jet::jet((1, 0));
    let flux = ctx.total_d(&(f.clone() * ux.clone()), jet::X)?;
    let rhs = expand(&(flux + h.clone() * ux + k.clone()));
    let mut pde = build_evolution(rhs)?;
    pde.provenance = Provenance::Grdc {
        f: simplify(&f),
        h: simplify(&h),
        k: simplify(&k),
    };
    Ok(pde)
}

/// `u_t = rhs` with `rhs` free of t-derivatives.
pub fn build_evolution(rhs: Expr) -> Result<EvolutionPDE, DeterminingError> {
    for name in jet::jets_in(&rhs) {
        let (_, nt) = jet::parse_jet(&name).unwrap();
        if nt > 0 {
            return Err(DeterminingError::IllegalDependence {
                component: "rhs".into(),
                symbol: name,
            });
        }
    }
    let rhs = simplify(&rhs);
    let delta = simplify(&(jet::jet((0, 1)) - rhs.clone()));
    Ok(EvolutionPDE {
        name: String::new(),
        rhs,
        delta,
        params: Vec::new(),
        assumptions: Assumptions::default(),
        provenance: Provenance::Rhs,
    })
}
