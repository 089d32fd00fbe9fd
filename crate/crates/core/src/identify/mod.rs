//! Identification of interventional distributions `P_x(y)`.
//!
//! Two strategies share one recursive engine: [`Id`] runs the classic
//! recursion, [`Pid`] additionally prunes vertices that cannot matter
//! before falling through to the same steps. Strategies are selected by name
//! through a [`Registry`].

mod engine;
mod pruning;

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::components::HedgeWitness;
use crate::expression::{metrics, render, Distribution, Expr, ExprError, Format};
use crate::graph::{GraphError, Smg, VarSet};

pub use pruning::{
    prune_connectors, prune_connectors_in_order, prune_interceptors, prune_latent, LatentDecision,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("`{0}` is both intervened on and an outcome")]
    Overlap(String),
    #[error("the outcome set must be nonempty")]
    NoOutcome,
    #[error("distribution scope does not match the graph's vertices")]
    ScopeMismatch,
}

/// A request for `P_x(y)` in `graph`.
#[derive(Debug, Clone)]
pub struct Query {
    graph: Smg,
    y: VarSet,
    x: VarSet,
}

impl Query {
    pub fn new(graph: Smg, y: VarSet, x: VarSet) -> Result<Self, IdentifyError> {
        validate(&graph, &y, &x)?;
        Ok(Query { graph, y, x })
    }

    pub fn graph(&self) -> &Smg {
        &self.graph
    }

    pub fn outcomes(&self) -> &VarSet {
        &self.y
    }

    pub fn interventions(&self) -> &VarSet {
        &self.x
    }
}

fn validate(graph: &Smg, y: &VarSet, x: &VarSet) -> Result<(), IdentifyError> {
    if y.is_empty() {
        return Err(IdentifyError::NoOutcome);
    }
    graph.indices(y)?;
    graph.indices(x)?;
    if let Some(v) = y.iter().find(|v| x.contains(*v)) {
        return Err(IdentifyError::Overlap(v.clone()));
    }
    Ok(())
}

/// How the latent-projection step visits its candidate vertices.
///
/// The names follow the convention of listing an ordering from the outcome
/// end (`Y > ... > W1`): `Topological` visits vertices nearest the outcome
/// first, `ReverseTopological` starts from the source end.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LatentOrder {
    Topological,
    #[default]
    ReverseTopological,
    /// Candidates are visited in this order; unlisted candidates are skipped.
    Explicit(Vec<String>),
}

impl LatentOrder {
    /// Candidate vertices of `g` in visiting order, restricted to `candidates`.
    pub fn arrange(&self, g: &Smg, candidates: &VarSet) -> Vec<String> {
        let filter = |names: Vec<String>| -> Vec<String> {
            names
                .into_iter()
                .filter(|v| candidates.contains(v))
                .collect()
        };
        match self {
            LatentOrder::ReverseTopological => filter(g.topological_order()),
            LatentOrder::Topological => {
                let mut order = g.topological_order();
                order.reverse();
                filter(order)
            }
            LatentOrder::Explicit(list) => {
                let mut seen = VarSet::new();
                filter(
                    list.iter()
                        .filter(|v| seen.insert((*v).clone()))
                        .cloned()
                        .collect(),
                )
            }
        }
    }
}

impl FromStr for LatentOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "topological" => Ok(LatentOrder::Topological),
            "reverse-topological" => Ok(LatentOrder::ReverseTopological),
            other => Err(format!(
                "unknown order `{other}` (expected topological or reverse-topological)"
            )),
        }
    }
}

/// What happened at one step of the recursion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// No interventions left: sum out everything but the outcomes.
    Marginal {
        summed: Vec<String>,
    },
    /// Non-ancestors of the outcomes dropped.
    NonAncestors {
        removed: Vec<String>,
    },
    /// Vertices cut off from the outcomes by the intervention removed.
    Interceptors {
        removed: Vec<String>,
    },
    /// Interceptors found but the subgraph differs from the projection.
    InterceptorsKept {
        candidates: Vec<String>,
    },
    /// Ancestors reachable only through a single vertex removed.
    Connectors {
        removed: Vec<String>,
    },
    LatentRejected {
        vertex: String,
    },
    LatentAccepted {
        vertex: String,
    },
    /// Vertices without effect on the outcomes added to the interventions.
    Enlarge {
        added: Vec<String>,
    },
    Factorize {
        components: Vec<Vec<String>>,
    },
    Fail,
    Chain {
        component: Vec<String>,
    },
    Restrict {
        component: Vec<String>,
    },
}

/// One trace record: the algorithm line that fired, the recursion depth and
/// the query it fired on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub depth: usize,
    pub line: u8,
    pub y: Vec<String>,
    pub x: Vec<String>,
    #[serde(flatten)]
    pub event: Event,
}

fn braced(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Marginal { summed } => write!(f, "marginalize {}", braced(summed)),
            Event::NonAncestors { removed } => write!(f, "drop non-ancestors {}", braced(removed)),
            Event::Interceptors { removed } => write!(f, "prune interceptors {}", braced(removed)),
            Event::InterceptorsKept { candidates } => {
                write!(
                    f,
                    "keep {}: projection differs from subgraph",
                    braced(candidates)
                )
            }
            Event::Connectors { removed } => write!(f, "prune connectors {}", braced(removed)),
            Event::LatentRejected { vertex } => write!(f, "keep {vertex} observed"),
            Event::LatentAccepted { vertex } => write!(f, "project out {vertex}"),
            Event::Enlarge { added } => write!(f, "intervene also on {}", braced(added)),
            Event::Factorize { components } => {
                let blocks: Vec<String> = components.iter().map(|c| braced(c)).collect();
                write!(f, "factorize over {}", blocks.join(" "))
            }
            Event::Fail => write!(f, "fail"),
            Event::Chain { component } => write!(f, "chain rule over {}", braced(component)),
            Event::Restrict { component } => write!(f, "restrict to {}", braced(component)),
        }
    }
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:indent$}line {}: {} [y={} x={}]",
            "",
            self.line,
            self.event,
            braced(&self.y),
            braced(&self.x),
            indent = 2 * self.depth
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Identified(Expr),
    Fail(Box<HedgeWitness>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifyResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceStep>,
}

impl IdentifyResult {
    pub fn expression(&self) -> Option<&Expr> {
        match &self.outcome {
            Outcome::Identified(e) => Some(e),
            Outcome::Fail(_) => None,
        }
    }

    pub fn hedge(&self) -> Option<&HedgeWitness> {
        match &self.outcome {
            Outcome::Identified(_) => None,
            Outcome::Fail(h) => Some(h),
        }
    }

    pub fn is_identified(&self) -> bool {
        matches!(self.outcome, Outcome::Identified(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match &self.outcome {
            Outcome::Identified(e) => json!({
                "status": "identified",
                "expression": e,
                "text": render(e, Format::Text),
                "metrics": metrics(e),
                "trace": self.trace,
            }),
            Outcome::Fail(h) => json!({
                "status": "fail",
                "hedge": h,
                "trace": self.trace,
            }),
        }
    }
}

/// An identification strategy.
pub trait Identifier: Send + Sync {
    fn name(&self) -> &'static str;

    /// Identifies `P_x(y)` from the observational joint over the graph.
    fn identify(&self, query: &Query) -> Result<IdentifyResult, IdentifyError> {
        let joint = Distribution::joint(query.graph().vertices().clone());
        self.identify_from(
            query.outcomes(),
            query.interventions(),
            &joint,
            query.graph(),
        )
    }

    /// Identifies `P_x(y)` from an arbitrary starting distribution whose
    /// scope equals the graph's vertices.
    fn identify_from(
        &self,
        y: &VarSet,
        x: &VarSet,
        p: &Distribution,
        g: &Smg,
    ) -> Result<IdentifyResult, IdentifyError>;
}

/// The unpruned recursion.
#[derive(Debug, Clone, Copy, Default)]
pub struct Id;

/// The recursion with pruning steps ahead of each level.
#[derive(Debug, Clone, Default)]
pub struct Pid {
    pub latent_order: LatentOrder,
}

impl Pid {
    pub fn with_order(latent_order: LatentOrder) -> Self {
        Pid { latent_order }
    }
}

impl Identifier for Id {
    fn name(&self) -> &'static str {
        "id"
    }

    fn identify_from(
        &self,
        y: &VarSet,
        x: &VarSet,
        p: &Distribution,
        g: &Smg,
    ) -> Result<IdentifyResult, IdentifyError> {
        id_algorithm(y, x, p, g)
    }
}

impl Identifier for Pid {
    fn name(&self) -> &'static str {
        "pid"
    }

    fn identify_from(
        &self,
        y: &VarSet,
        x: &VarSet,
        p: &Distribution,
        g: &Smg,
    ) -> Result<IdentifyResult, IdentifyError> {
        pid_algorithm(y, x, p, g, &self.latent_order)
    }
}

pub fn id_algorithm(
    y: &VarSet,
    x: &VarSet,
    p: &Distribution,
    g: &Smg,
) -> Result<IdentifyResult, IdentifyError> {
    engine::run(y, x, p, g, None)
}

pub fn pid_algorithm(
    y: &VarSet,
    x: &VarSet,
    p: &Distribution,
    g: &Smg,
    order: &LatentOrder,
) -> Result<IdentifyResult, IdentifyError> {
    engine::run(y, x, p, g, Some(order))
}

/// Options handed to strategy constructors.
#[derive(Debug, Clone, Default)]
pub struct StrategyConfig {
    pub latent_order: LatentOrder,
}

type Factory = Box<dyn Fn(&StrategyConfig) -> Box<dyn Identifier> + Send + Sync>;

/// Identification strategies by name.
pub struct Registry {
    factories: IndexMap<&'static str, Factory>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            factories: IndexMap::new(),
        }
    }

    /// `id` and `pid`.
    pub fn standard() -> Self {
        let mut r = Registry::empty();
        r.register("id", Box::new(|_| Box::new(Id)));
        r.register(
            "pid",
            Box::new(|c| Box::new(Pid::with_order(c.latent_order.clone()))),
        );
        r
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, config: &StrategyConfig) -> Option<Box<dyn Identifier>> {
        self.factories.get(name).map(|f| f(config))
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::standard()
    }
}
