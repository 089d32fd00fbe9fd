//! Symbolic probability expressions and the distributions threaded through
//! identification.

mod canonical;
mod parse;
mod render;

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VarSet;

pub use canonical::{canonicalize, metrics, normalize, rename_bound, Metrics};
pub use parse::{from_json, parse_text};
pub use render::{render, Format};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("`{0}` is not in the distribution's scope")]
    NotInScope(String),
    #[error("order does not cover the distribution's scope exactly")]
    OrderMismatch,
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("invalid JSON expression: {0}")]
    Json(String),
}

/// A variable occurrence: a vertex name plus prime decoration for bound copies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    #[serde(default)]
    pub primes: u32,
}

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            primes: 0,
        }
    }

    pub fn primed(name: impl Into<String>, primes: u32) -> Self {
        Var {
            name: name.into(),
            primes,
        }
    }
}

impl From<&str> for Var {
    fn from(name: &str) -> Self {
        Var::new(name)
    }
}

impl From<&String> for Var {
    fn from(name: &String) -> Self {
        Var::new(name.clone())
    }
}

impl From<String> for Var {
    fn from(name: String) -> Self {
        Var::new(name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for _ in 0..self.primes {
            f.write_str("'")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    /// `P(out | given)`.
    Atom {
        out: Vec<Var>,
        given: Vec<Var>,
    },
    Sum {
        bound: Vec<Var>,
        body: Box<Expr>,
    },
    #[serde(rename = "prod")]
    Product(Vec<Expr>),
    #[serde(rename = "div")]
    Quotient {
        num: Box<Expr>,
        den: Box<Expr>,
    },
}

impl Expr {
    pub fn atom<O, G, A, B>(out: O, given: G) -> Expr
    where
        O: IntoIterator<Item = A>,
        A: Into<Var>,
        G: IntoIterator<Item = B>,
        B: Into<Var>,
    {
        Expr::Atom {
            out: out.into_iter().map(Into::into).collect(),
            given: given.into_iter().map(Into::into).collect(),
        }
    }

    /// `sum_{bound} body`; returns `body` unchanged when `bound` is empty.
    pub fn sum(bound: Vec<Var>, body: Expr) -> Expr {
        if bound.is_empty() {
            body
        } else {
            Expr::Sum {
                bound,
                body: Box::new(body),
            }
        }
    }

    /// Product with nested products flattened; a single factor is returned as is.
    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Expr::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one factor")
        } else {
            Expr::Product(flat)
        }
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        Expr::Quotient {
            num: Box::new(num),
            den: Box::new(den),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> IndexSet<Var> {
        let mut out = IndexSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut IndexSet<Var>) {
        match self {
            Expr::Atom { out: o, given } => {
                for v in o.iter().chain(given) {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Expr::Sum { bound: b, body } => {
                let depth = bound.len();
                bound.extend(b.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Expr::Product(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Expr::Quotient { num, den } => {
                num.collect_free(bound, out);
                den.collect_free(bound, out);
            }
        }
    }

    /// Every vertex name mentioned anywhere, free or bound.
    pub fn base_names(&self) -> IndexSet<String> {
        let mut names = IndexSet::new();
        self.visit(&mut |e| match e {
            Expr::Atom { out, given } => {
                names.extend(out.iter().chain(given).map(|v| v.name.clone()));
            }
            Expr::Sum { bound, .. } => names.extend(bound.iter().map(|v| v.name.clone())),
            _ => {}
        });
        names
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Atom { .. } => {}
            Expr::Sum { body, .. } => body.visit(f),
            Expr::Product(fs) => fs.iter().for_each(|e| e.visit(f)),
            Expr::Quotient { num, den } => {
                num.visit(f);
                den.visit(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Format::Text))
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_text(s)
    }
}

/// The distribution `P` passed down the identification recursion.
///
/// `atomic` marks the raw joint (or a marginal of it), whose conditionals
/// are plain atoms. Otherwise conditionals are quotients of marginals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    expr: Expr,
    scope: VarSet,
    atomic: bool,
}

impl Distribution {
    /// The observational joint `P(scope)`.
    pub fn joint(scope: VarSet) -> Self {
        let expr = Expr::atom(scope.iter(), Vec::<Var>::new());
        Distribution {
            expr,
            scope,
            atomic: true,
        }
    }

    /// A derived distribution over `scope`; variables of `expr` outside
    /// `scope` act as fixed context.
    pub fn derived(expr: Expr, scope: VarSet) -> Self {
        Distribution {
            expr,
            scope,
            atomic: false,
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    /// Sums out `z`. Joints stay joints; otherwise the variables join an
    /// existing outermost sum or a new one is wrapped around the expression.
    pub fn marginalize(&self, z: &VarSet) -> Result<Distribution, ExprError> {
        if let Some(v) = z.iter().find(|v| !self.scope.contains(*v)) {
            return Err(ExprError::NotInScope(v.clone()));
        }
        if z.is_empty() {
            return Ok(self.clone());
        }
        let scope: VarSet = self
            .scope
            .iter()
            .filter(|v| !z.contains(*v))
            .cloned()
            .collect();
        if self.atomic {
            return Ok(Distribution::joint(scope));
        }
        let summed: Vec<Var> = self
            .scope
            .iter()
            .filter(|v| z.contains(*v))
            .map(Var::from)
            .collect();
        let expr = match &self.expr {
            Expr::Sum { bound, body } => {
                let mut bound = bound.clone();
                bound.extend(summed);
                Expr::Sum {
                    bound,
                    body: body.clone(),
                }
            }
            other => Expr::sum(summed, other.clone()),
        };
        Ok(Distribution {
            expr,
            scope,
            atomic: false,
        })
    }

    /// `P(v | given)` derived from this distribution.
    pub fn conditional(&self, v: &str, given: &VarSet) -> Result<Expr, ExprError> {
        for name in given.iter().map(String::as_str).chain([v]) {
            if !self.scope.contains(name) {
                return Err(ExprError::NotInScope(name.to_string()));
            }
        }
        if self.atomic {
            return Ok(Expr::atom([v], given.iter()));
        }
        let others = |keep_v: bool| -> VarSet {
            self.scope
                .iter()
                .filter(|s| !given.contains(*s) && (!keep_v || s.as_str() != v))
                .cloned()
                .collect()
        };
        let num = self.marginalize(&others(true))?.into_expr();
        if given.is_empty() {
            return Ok(num);
        }
        let den = self.marginalize(&others(false))?.into_expr();
        Ok(Expr::quotient(num, den))
    }

    /// `prod_{v in targets} P(v | predecessors of v in order)`, listed with
    /// the latest variable first.
    pub fn chain_factorize(&self, targets: &VarSet, order: &[String]) -> Result<Expr, ExprError> {
        let covered: VarSet = order.iter().cloned().collect();
        if covered.len() != order.len() || covered != self.scope {
            return Err(ExprError::OrderMismatch);
        }
        if let Some(v) = targets.iter().find(|v| !self.scope.contains(*v)) {
            return Err(ExprError::NotInScope(v.clone()));
        }
        let mut factors = Vec::new();
        for (i, v) in order.iter().enumerate() {
            if targets.contains(v) {
                let preds: VarSet = order[..i].iter().cloned().collect();
                factors.push(self.conditional(v, &preds)?);
            }
        }
        factors.reverse();
        Ok(Expr::product(factors))
    }
}
