//! Ground truth for small discrete models.
//!
//! [`sample_scm`] draws a strictly positive model over an [`Smg`] with one
//! latent parent per bidirected edge. From it [`observational_joint`] gives
//! the exact observed joint and [`interventional_truncated`] the exact
//! interventional distribution, which [`eval_expression`] results can be
//! checked against.

mod eval;
mod random;
mod table;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Smg;

pub use eval::{eval_expression, max_deviation, Evaluator};
pub use random::{random_latent_dag, random_smg};
pub use table::{compare_tables, for_each_config, Assignment, ProbTable};

/// Smallest probability any CPT entry may take.
pub const FLOOR: f64 = 0.01;

/// Largest joint space, latents included, the oracle will enumerate.
pub const MAX_CELLS: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("outcome space of {0} cells exceeds the limit of {MAX_CELLS}")]
    TooLarge(u128),
    #[error("invalid value for `{0}`")]
    InvalidAssignment(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value for `{0}`")]
    Unbound(String),
    #[error("`{0}` appears twice in one term")]
    Repeated(String),
    #[error("table shapes differ")]
    ShapeMismatch,
    #[error("division by zero")]
    ZeroDenominator,
}

/// The conditional table of one variable given its parents.
///
/// Rows are parent configurations (last parent fastest); within a row,
/// entries follow the variable's own value.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub variable: String,
    pub card: usize,
    pub parents: Vec<String>,
    pub table: Vec<f64>,
    parent_cards: Vec<usize>,
    // Positions of the variable and its parents in the full variable list.
    slot: usize,
    parent_slots: Vec<usize>,
}

impl Factor {
    /// `P(variable = value | parents = parent_values)`.
    pub fn prob(&self, value: usize, parent_values: &[usize]) -> f64 {
        let row = parent_values
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&v, &c)| acc * c + v);
        self.table[row * self.card + value]
    }

    fn prob_in(&self, full: &[usize]) -> f64 {
        let row = self
            .parent_slots
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + full[s]);
        self.table[row * self.card + full[self.slot]]
    }
}

/// A discrete causal model over an [`Smg`]: one CPT per observed variable
/// and one prior per latent, each latent the common parent of the two
/// endpoints of one bidirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScm {
    graph: Smg,
    observed: Vec<Factor>,
    latent: Vec<Factor>,
}

impl DiscreteScm {
    pub fn graph(&self) -> &Smg {
        &self.graph
    }

    /// CPTs of the observed variables, in graph order.
    pub fn factors(&self) -> &[Factor] {
        &self.observed
    }

    /// Priors of the latent variables, one per bidirected edge.
    pub fn latents(&self) -> &[Factor] {
        &self.latent
    }

    pub fn factor(&self, name: &str) -> Option<&Factor> {
        self.observed.iter().find(|f| f.variable == name)
    }

    pub fn cardinality(&self, name: &str) -> Option<usize> {
        self.factor(name).map(|f| f.card)
    }

    fn all_factors(&self) -> impl Iterator<Item = &Factor> {
        self.observed.iter().chain(&self.latent)
    }

    fn full_cards(&self) -> Vec<usize> {
        self.all_factors().map(|f| f.card).collect()
    }

    fn guard(&self) -> Result<(), OracleError> {
        let cells = self.full_cards().iter().try_fold(1u128, |acc, &c| {
            acc.checked_mul(c as u128).filter(|&n| n <= MAX_CELLS)
        });
        match cells {
            Some(_) => Ok(()),
            None => Err(OracleError::TooLarge(
                self.full_cards()
                    .iter()
                    .map(|&c| c as u128)
                    .fold(1u128, u128::saturating_mul),
            )),
        }
    }

    fn observed_names(&self) -> Vec<String> {
        self.observed.iter().map(|f| f.variable.clone()).collect()
    }
}

/// Draws one row of `card` probabilities, each at least [`FLOOR`].
fn draw_row(rng: &mut ChaCha8Rng, card: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..card).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let spare = 1.0 - card as f64 * FLOOR;
    raw.iter().map(|u| FLOOR + spare * u / total).collect()
}

/// A seeded random model in which every variable, latent or observed, has
/// `card` values.
///
/// # Panics
///
/// If `card < 2` or `card * FLOOR >= 1`.
pub fn sample_scm(g: &Smg, seed: u64, card: usize) -> DiscreteScm {
    assert!(
        card >= 2 && (card as f64) * FLOOR < 1.0,
        "cardinality {card} out of range"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.len();
    let edges: Vec<(usize, usize)> = g
        .bidirected_edges()
        .map(|(a, b)| (g.index(a).unwrap(), g.index(b).unwrap()))
        .collect();

    let mut observed = Vec::with_capacity(n);
    for (i, name) in g.vertices().iter().enumerate() {
        let mut parents: Vec<String> = Vec::new();
        let mut parent_slots: Vec<usize> = Vec::new();
        for &p in g.parent_indices(i) {
            parents.push(g.vertices()[p].clone());
            parent_slots.push(p);
        }
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a == i || b == i {
                parents.push(latent_name(g, a, b));
                parent_slots.push(n + k);
            }
        }
        let parent_cards = vec![card; parents.len()];
        let rows: usize = parent_cards.iter().product();
        let table = (0..rows).flat_map(|_| draw_row(&mut rng, card)).collect();
        observed.push(Factor {
            variable: name.clone(),
            card,
            parents,
            table,
            parent_cards,
            slot: i,
            parent_slots,
        });
    }
    let latent = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Factor {
            variable: latent_name(g, a, b),
            card,
            parents: Vec::new(),
            table: draw_row(&mut rng, card),
            parent_cards: Vec::new(),
            slot: n + k,
            parent_slots: Vec::new(),
        })
        .collect();
    DiscreteScm {
        graph: g.clone(),
        observed,
        latent,
    }
}

fn latent_name(g: &Smg, a: usize, b: usize) -> String {
    format!("U[{},{}]", g.vertices()[a], g.vertices()[b])
}

/// The exact joint over the observed variables, in graph order.
pub fn observational_joint(m: &DiscreteScm) -> Result<ProbTable, OracleError> {
    m.guard()?;
    let n = m.observed.len();
    let mut out = ProbTable::zeros(
        m.observed_names(),
        m.observed.iter().map(|f| f.card).collect(),
    );
    for_each_config(&m.full_cards(), |full| {
        let p: f64 = m.all_factors().map(|f| f.prob_in(full)).product();
        out.add(&full[..n], p);
    });
    Ok(out)
}

/// `P_x(y)` by the truncated factorization: the factors of intervened
/// variables are dropped and their values clamped to `x`.
pub fn interventional_truncated(
    m: &DiscreteScm,
    x: &Assignment,
    y: &[String],
) -> Result<ProbTable, OracleError> {
    m.guard()?;
    let mut clamp: Vec<Option<usize>> = vec![None; m.observed.len() + m.latent.len()];
    for (name, &value) in x {
        let f = m
            .observed
            .iter()
            .find(|f| &f.variable == name)
            .ok_or_else(|| OracleError::UnknownVariable(name.clone()))?;
        if value >= f.card {
            return Err(OracleError::InvalidAssignment(name.clone()));
        }
        clamp[f.slot] = Some(value);
    }
    let y_slots = y
        .iter()
        .map(|v| {
            m.factor(v)
                .map(|f| f.slot)
                .ok_or_else(|| OracleError::UnknownVariable(v.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = ProbTable::zeros(
        y.to_vec(),
        y_slots.iter().map(|&s| m.observed[s].card).collect(),
    );
    let kept: Vec<&Factor> = m
        .all_factors()
        .filter(|f| clamp[f.slot].is_none())
        .collect();
    let mut cell = vec![0; y.len()];
    for_each_config(&m.full_cards(), |full| {
        if clamp
            .iter()
            .zip(full)
            .any(|(c, &v)| c.is_some_and(|c| c != v))
        {
            return;
        }
        let p: f64 = kept.iter().map(|f| f.prob_in(full)).product();
        for (c, &s) in cell.iter_mut().zip(&y_slots) {
            *c = full[s];
        }
        out.add(&cell, p);
    });
    Ok(out)
}
