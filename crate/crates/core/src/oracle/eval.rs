//! Numeric evaluation of expressions against a joint table.

use std::collections::HashMap;

use crate::expression::{Expr, Var};
use crate::graph::VarSet;

use super::{
    interventional_truncated, observational_joint, Assignment, DiscreteScm, OracleError, ProbTable,
};

enum Node {
    Atom {
        num: Lookup,
        den: Option<Lookup>,
    },
    Sum {
        slots: Vec<usize>,
        cards: Vec<usize>,
        body: Box<Node>,
    },
    Product(Vec<Node>),
    Quotient(Box<Node>, Box<Node>),
}

/// A marginal table and the slots holding its variables' values.
struct Lookup {
    table: usize,
    slots: Vec<usize>,
}

/// An expression compiled against one joint table.
///
/// Each atom `P(a|b)` reads `P(a,b) / P(b)` from cached marginals. A primed
/// variable takes its values from the table variable of the same base name.
pub struct Evaluator<'a> {
    joint: &'a ProbTable,
    marginals: Vec<ProbTable>,
    cache: HashMap<Vec<String>, usize>,
    vars: Vec<Var>,
    root: Node,
}

impl<'a> Evaluator<'a> {
    pub fn new(e: &Expr, joint: &'a ProbTable) -> Result<Self, OracleError> {
        let mut ev = Evaluator {
            joint,
            marginals: Vec::new(),
            cache: HashMap::new(),
            vars: Vec::new(),
            root: Node::Product(Vec::new()),
        };
        ev.root = ev.compile(e)?;
        Ok(ev)
    }

    fn slot(&mut self, v: &Var) -> usize {
        match self.vars.iter().position(|u| u == v) {
            Some(i) => i,
            None => {
                self.vars.push(v.clone());
                self.vars.len() - 1
            }
        }
    }

    fn lookup(&mut self, vars: &[&Var]) -> Result<Lookup, OracleError> {
        let mut keyed: Vec<(String, usize)> = Vec::with_capacity(vars.len());
        for v in vars {
            if keyed.iter().any(|(name, _)| *name == v.name) {
                return Err(OracleError::Repeated(v.name.clone()));
            }
            let slot = self.slot(v);
            keyed.push((v.name.clone(), slot));
        }
        keyed.sort();
        let names: Vec<String> = keyed.iter().map(|(n, _)| n.clone()).collect();
        let table = match self.cache.get(&names) {
            Some(&i) => i,
            None => {
                self.marginals.push(self.joint.marginal(&names)?);
                self.cache.insert(names, self.marginals.len() - 1);
                self.marginals.len() - 1
            }
        };
        Ok(Lookup {
            table,
            slots: keyed.into_iter().map(|(_, s)| s).collect(),
        })
    }

    fn compile(&mut self, e: &Expr) -> Result<Node, OracleError> {
        Ok(match e {
            Expr::Atom { out, given } => {
                let all: Vec<&Var> = out.iter().chain(given).collect();
                let num = self.lookup(&all)?;
                let den = if given.is_empty() {
                    None
                } else {
                    Some(self.lookup(&given.iter().collect::<Vec<_>>())?)
                };
                Node::Atom { num, den }
            }
            Expr::Sum { bound, body } => {
                let mut slots = Vec::new();
                let mut cards = Vec::new();
                for b in bound {
                    let card = self
                        .joint
                        .cardinality(&b.name)
                        .ok_or_else(|| OracleError::UnknownVariable(b.name.clone()))?;
                    slots.push(self.slot(b));
                    cards.push(card);
                }
                Node::Sum {
                    slots,
                    cards,
                    body: Box::new(self.compile(body)?),
                }
            }
            Expr::Product(fs) => Node::Product(
                fs.iter()
                    .map(|f| self.compile(f))
                    .collect::<Result<_, _>>()?,
            ),
            Expr::Quotient { num, den } => {
                Node::Quotient(Box::new(self.compile(num)?), Box::new(self.compile(den)?))
            }
        })
    }

    /// Value with free variables taken from `free`, keyed by rendered name
    /// (`X`, `X'`, ...). Extra entries are ignored.
    pub fn eval(&self, free: &Assignment) -> Result<f64, OracleError> {
        let mut env: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| free.get(&v.to_string()).copied())
            .collect();
        for (v, value) in self.vars.iter().zip(&env) {
            if let Some(value) = value {
                if *value >= self.joint.cardinality(&v.name).unwrap_or(0) {
                    return Err(OracleError::InvalidAssignment(v.to_string()));
                }
            }
        }
        self.node(&self.root, &mut env)
    }

    fn read(&self, l: &Lookup, env: &[Option<usize>]) -> Result<f64, OracleError> {
        let table = &self.marginals[l.table];
        let mut offset = 0;
        for (&s, &c) in l.slots.iter().zip(table.cardinalities()) {
            let v = env[s].ok_or_else(|| OracleError::Unbound(self.vars[s].to_string()))?;
            offset = offset * c + v;
        }
        Ok(table.values()[offset])
    }

    fn node(&self, n: &Node, env: &mut Vec<Option<usize>>) -> Result<f64, OracleError> {
        match n {
            Node::Atom { num, den } => {
                let joint = self.read(num, env)?;
                match den {
                    None => Ok(joint),
                    Some(den) => divide(joint, self.read(den, env)?),
                }
            }
            Node::Product(fs) => fs
                .iter()
                .try_fold(1.0, |acc, f| Ok(acc * self.node(f, env)?)),
            Node::Quotient(num, den) => {
                let n = self.node(num, env)?;
                divide(n, self.node(den, env)?)
            }
            Node::Sum { slots, cards, body } => {
                let saved: Vec<Option<usize>> = slots.iter().map(|&s| env[s]).collect();
                let mut total = 0.0;
                let mut failure = None;
                super::for_each_config(cards, |config| {
                    if failure.is_some() {
                        return;
                    }
                    for (&s, &v) in slots.iter().zip(config) {
                        env[s] = Some(v);
                    }
                    match self.node(body, env) {
                        Ok(v) => total += v,
                        Err(e) => failure = Some(e),
                    }
                });
                for (&s, v) in slots.iter().zip(saved) {
                    env[s] = v;
                }
                failure.map_or(Ok(total), Err)
            }
        }
    }
}

fn divide(num: f64, den: f64) -> Result<f64, OracleError> {
    if den == 0.0 {
        Err(OracleError::ZeroDenominator)
    } else {
        Ok(num / den)
    }
}

/// One-off evaluation; see [`Evaluator`].
pub fn eval_expression(e: &Expr, joint: &ProbTable, free: &Assignment) -> Result<f64, OracleError> {
    Evaluator::new(e, joint)?.eval(free)
}

/// Largest absolute gap, over every value of `x` and `y`, between `e`
/// evaluated on the model's joint and the true `P_x(y)`.
///
/// Free variables of `e` outside `x` and `y` must not matter; every value
/// they can take is checked.
pub fn max_deviation(
    e: &Expr,
    m: &DiscreteScm,
    y: &VarSet,
    x: &VarSet,
) -> Result<f64, OracleError> {
    if let Some(v) = e.free_vars().iter().find(|v| v.primes > 0) {
        return Err(OracleError::Unbound(v.to_string()));
    }
    let extra: Vec<String> = e
        .free_vars()
        .into_iter()
        .map(|v| v.name)
        .filter(|v| !x.contains(v) && !y.contains(v))
        .collect();
    let joint = observational_joint(m)?;
    let evaluator = Evaluator::new(e, &joint)?;
    let cards = |names: &[String]| {
        names
            .iter()
            .map(|v| {
                m.cardinality(v)
                    .ok_or_else(|| OracleError::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let x_names: Vec<String> = x.iter().cloned().collect();
    let y_names: Vec<String> = y.iter().cloned().collect();
    let x_cards = cards(&x_names)?;
    let extra_cards = cards(&extra)?;

    let mut worst: f64 = 0.0;
    let mut failure = None;
    super::for_each_config(&x_cards, |xc| {
        if failure.is_some() {
            return;
        }
        let xa: Assignment = x_names.iter().cloned().zip(xc.iter().copied()).collect();
        let truth = match interventional_truncated(m, &xa, &y_names) {
            Ok(t) => t,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        super::for_each_config(truth.cardinalities(), |yc| {
            super::for_each_config(&extra_cards, |ec| {
                if failure.is_some() {
                    return;
                }
                let mut a = truth.assignment(yc);
                a.extend(xa.clone());
                a.extend(extra.iter().cloned().zip(ec.iter().copied()));
                match evaluator.eval(&a) {
                    Ok(v) => worst = worst.max((v - truth.at(yc)).abs()),
                    Err(e) => failure = Some(e),
                }
            });
        });
    });
    failure.map_or(Ok(worst), Err)
}
