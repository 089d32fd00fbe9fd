//! The shared recursion behind [`super::Id`] and [`super::Pid`].

use crate::components::{make_hedge_witness, maximal_c_components, HedgeWitness};
use crate::expression::{rename_bound, Distribution, Expr, Var};
use crate::graph::{Smg, VarSet};

use super::pruning::{prune_connectors, prune_interceptors, prune_latent};
use super::{validate, Event, IdentifyError, IdentifyResult, LatentOrder, Outcome, TraceStep};

enum Stop {
    Fail(Box<HedgeWitness>),
    Error(IdentifyError),
}

impl<E: Into<IdentifyError>> From<E> for Stop {
    fn from(e: E) -> Self {
        Stop::Error(e.into())
    }
}

type Step = Result<Expr, Stop>;

fn minus(a: &VarSet, b: &VarSet) -> VarSet {
    a.iter().filter(|v| !b.contains(*v)).cloned().collect()
}

fn meet(a: &VarSet, b: &VarSet) -> VarSet {
    a.iter().filter(|v| b.contains(*v)).cloned().collect()
}

fn names(s: &VarSet) -> Vec<String> {
    s.iter().cloned().collect()
}

fn vars(s: &VarSet) -> Vec<Var> {
    s.iter().map(Var::from).collect()
}

pub(super) fn run(
    y: &VarSet,
    x: &VarSet,
    p: &Distribution,
    g: &Smg,
    pruning: Option<&LatentOrder>,
) -> Result<IdentifyResult, IdentifyError> {
    validate(g, y, x)?;
    if p.scope() != g.vertices() {
        return Err(IdentifyError::ScopeMismatch);
    }
    let mut engine = Engine {
        pruning,
        trace: Vec::new(),
    };
    let outcome = match engine.step(y, x, p.clone(), g.clone(), 0) {
        Ok(e) => Outcome::Identified(rename_bound(&e)),
        Err(Stop::Fail(h)) => Outcome::Fail(h),
        Err(Stop::Error(e)) => return Err(e),
    };
    Ok(IdentifyResult {
        outcome,
        trace: engine.trace,
    })
}

struct Engine<'a> {
    pruning: Option<&'a LatentOrder>,
    trace: Vec<TraceStep>,
}

impl Engine<'_> {
    /// Line number as printed for this algorithm: the pruning variant has
    /// three extra lines ahead of the shared tail.
    fn line(&self, shared: u8) -> u8 {
        if self.pruning.is_some() && shared >= 3 {
            shared + 3
        } else {
            shared
        }
    }

    fn record(&mut self, depth: usize, line: u8, y: &VarSet, x: &VarSet, event: Event) {
        self.trace.push(TraceStep {
            depth,
            line,
            y: names(y),
            x: names(x),
            event,
        });
    }

    fn step(&mut self, y: &VarSet, x: &VarSet, p: Distribution, g: Smg, depth: usize) -> Step {
        let v = g.vertices().clone();

        if x.is_empty() {
            let summed = minus(&v, y);
            self.record(
                depth,
                1,
                y,
                x,
                Event::Marginal {
                    summed: names(&summed),
                },
            );
            return Ok(p.marginalize(&summed)?.into_expr());
        }

        let ancestors = g.ancestors(y)?;
        if ancestors.len() < v.len() {
            let removed = minus(&v, &ancestors);
            self.record(
                depth,
                2,
                y,
                x,
                Event::NonAncestors {
                    removed: names(&removed),
                },
            );
            return self.step(
                y,
                &meet(x, &ancestors),
                p.marginalize(&removed)?,
                g.induced_subgraph(&ancestors)?,
                depth + 1,
            );
        }

        let (p, g) = match self.pruning {
            Some(order) => match self.prune(y, x, p, g, order, depth)? {
                Pruned::Done(e) => return Ok(e),
                Pruned::Continue(p, g) => (p, g),
            },
            None => (p, g),
        };
        let v = g.vertices().clone();

        let cut = g.mutilate(x, &VarSet::new())?;
        let idle = minus(&minus(&v, x), &cut.ancestors(y)?);
        if !idle.is_empty() {
            let line = self.line(3);
            self.record(
                depth,
                line,
                y,
                x,
                Event::Enlarge {
                    added: names(&idle),
                },
            );
            let mut enlarged = x.clone();
            enlarged.extend(idle);
            return self.step(y, &enlarged, p, g, depth + 1);
        }

        let rest = minus(&v, x);
        let districts = maximal_c_components(&g.induced_subgraph(&rest)?);
        if districts.len() > 1 {
            let line = self.line(4);
            let components = districts.blocks().iter().map(names).collect();
            self.record(depth, line, y, x, Event::Factorize { components });
            let mut factors = Vec::new();
            for s in districts.blocks() {
                factors.push(self.step(s, &minus(&v, s), p.clone(), g.clone(), depth + 1)?);
            }
            let summed = minus(&rest, y);
            return Ok(Expr::sum(vars(&summed), Expr::product(factors)));
        }

        let s = &districts.blocks()[0];
        let whole = maximal_c_components(&g);
        if whole.len() == 1 {
            let line = self.line(5);
            self.record(depth, line, y, x, Event::Fail);
            return Err(Stop::Fail(Box::new(make_hedge_witness(&g, s)?)));
        }

        let order = g.topological_order();
        if whole.contains_block(s) {
            let line = self.line(6);
            self.record(
                depth,
                line,
                y,
                x,
                Event::Chain {
                    component: names(s),
                },
            );
            let product = p.chain_factorize(s, &order)?;
            return Ok(Expr::sum(vars(&minus(s, y)), product));
        }

        let enclosing = whole
            .blocks()
            .iter()
            .find(|b| s.iter().all(|v| b.contains(v)))
            .expect("a district of G[V \\ X] lies inside one district of G")
            .clone();
        let line = self.line(7);
        self.record(
            depth,
            line,
            y,
            x,
            Event::Restrict {
                component: names(&enclosing),
            },
        );
        let local =
            Distribution::derived(p.chain_factorize(&enclosing, &order)?, enclosing.clone());
        self.step(
            y,
            &meet(x, &enclosing),
            local,
            g.induced_subgraph(&enclosing)?,
            depth + 1,
        )
    }

    fn prune(
        &mut self,
        y: &VarSet,
        x: &VarSet,
        p: Distribution,
        g: Smg,
        order: &LatentOrder,
        depth: usize,
    ) -> Result<Pruned, Stop> {
        let v = g.vertices().clone();

        let cut_off = prune_interceptors(y, x, &g)?;
        if !cut_off.is_empty() {
            let keep = minus(&v, &cut_off);
            let induced = g.induced_subgraph(&keep)?;
            if induced == g.latent_projection(&keep)? {
                self.record(
                    depth,
                    3,
                    y,
                    x,
                    Event::Interceptors {
                        removed: names(&cut_off),
                    },
                );
                let e = self.step(
                    y,
                    &minus(x, &cut_off),
                    p.marginalize(&cut_off)?,
                    induced,
                    depth + 1,
                )?;
                return Ok(Pruned::Done(e));
            }
            self.record(
                depth,
                3,
                y,
                x,
                Event::InterceptorsKept {
                    candidates: names(&cut_off),
                },
            );
        }

        let detached = prune_connectors(y, x, &g)?;
        if !detached.is_empty() {
            self.record(
                depth,
                4,
                y,
                x,
                Event::Connectors {
                    removed: names(&detached),
                },
            );
            let keep = minus(&v, &detached);
            let e = self.step(
                y,
                x,
                p.marginalize(&detached)?,
                g.induced_subgraph(&keep)?,
                depth + 1,
            )?;
            return Ok(Pruned::Done(e));
        }

        let (p, g, decisions) = prune_latent(y, x, &p, &g, order)?;
        for d in decisions {
            let event = if d.accepted {
                Event::LatentAccepted { vertex: d.vertex }
            } else {
                Event::LatentRejected { vertex: d.vertex }
            };
            self.record(depth, 5, y, x, event);
        }
        Ok(Pruned::Continue(p, g))
    }
}

// Short-lived; boxing the larger variant buys nothing.
#[allow(clippy::large_enum_variant)]
enum Pruned {
    Done(Expr),
    Continue(Distribution, Smg),
}
