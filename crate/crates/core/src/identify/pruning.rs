//! The three pruning criteria, each usable on its own.

use crate::components::maximal_c_components;
use crate::expression::Distribution;
use crate::graph::{set, GraphError, Smg, VarSet};

use super::{IdentifyError, LatentOrder};

fn minus(a: &VarSet, b: &VarSet) -> VarSet {
    a.iter().filter(|v| !b.contains(*v)).cloned().collect()
}

/// Ancestors of `y` that lose all connection to `y` once edges into `x`
/// are cut. Removing them is sound only when the induced subgraph on the
/// remaining vertices equals the latent projection onto them; the caller
/// checks that.
pub fn prune_interceptors(y: &VarSet, x: &VarSet, g: &Smg) -> Result<VarSet, GraphError> {
    let ancestors = g.ancestors(y)?;
    let cut = g.mutilate(x, &VarSet::new())?;
    Ok(minus(&ancestors, &cut.connected(y)?))
}

/// Union over `w` outside `x` of the part of `R_w` that is disconnected from
/// everything else once edges into `w` are cut, where `R_w` holds the
/// ancestors of `w` with edges into `x` cut, minus descendants of `x` and
/// minus the outcomes.
pub fn prune_connectors(y: &VarSet, x: &VarSet, g: &Smg) -> Result<VarSet, GraphError> {
    let order: Vec<String> = minus(g.vertices(), x).into_iter().collect();
    prune_connectors_in_order(y, x, g, &order)
}

/// [`prune_connectors`] with an explicit loop order over `w`.
pub fn prune_connectors_in_order(
    y: &VarSet,
    x: &VarSet,
    g: &Smg,
    order: &[String],
) -> Result<VarSet, GraphError> {
    let cut_x = g.mutilate(x, &VarSet::new())?;
    let below_x = g.descendants(x)?;
    let mut removed = VarSet::new();
    for w in order {
        let w_set = set([w.as_str()]);
        let r = minus(&minus(&cut_x.ancestors(&w_set)?, &below_x), y);
        if r.is_empty() {
            continue;
        }
        let rest = minus(g.vertices(), &r);
        let reach = if rest.is_empty() {
            VarSet::new()
        } else {
            g.mutilate(&w_set, &VarSet::new())?.connected(&rest)?
        };
        removed.extend(minus(&r, &reach));
    }
    Ok(g.vertices()
        .iter()
        .filter(|v| removed.contains(*v))
        .cloned()
        .collect())
}

/// Outcome of testing one candidate in [`prune_latent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentDecision {
    pub vertex: String,
    pub accepted: bool,
}

/// True when no child of `x` shares its C-component.
fn children_outside_component(g: &Smg, x: &str) -> Result<bool, GraphError> {
    let partition = maximal_c_components(g);
    let component = partition.block_of(x).expect("x is a vertex");
    let children = g.children(&set([x]))?;
    Ok(!children.iter().any(|c| c != x && component.contains(c)))
}

/// Projects out, one at a time, candidates whose removal keeps every child
/// of the single intervened vertex outside its C-component.
pub fn prune_latent(
    y: &VarSet,
    x: &VarSet,
    p: &Distribution,
    g: &Smg,
    order: &LatentOrder,
) -> Result<(Distribution, Smg, Vec<LatentDecision>), IdentifyError> {
    let unchanged = || Ok((p.clone(), g.clone(), Vec::new()));
    if x.len() != 1 {
        return unchanged();
    }
    let xv = x[0].as_str();
    if !children_outside_component(g, xv)? {
        return unchanged();
    }
    let candidates = minus(&minus(g.vertices(), y), x);
    let mut p = p.clone();
    let mut g = g.clone();
    let mut decisions = Vec::new();
    for w in order.arrange(&g, &candidates) {
        let keep = minus(g.vertices(), &set([w.as_str()]));
        let projected = g.latent_projection(&keep)?;
        let accepted = children_outside_component(&projected, xv)?;
        if accepted {
            p = p.marginalize(&set([w.as_str()]))?;
            g = projected;
        }
        decisions.push(LatentDecision {
            vertex: w,
            accepted,
        });
    }
    Ok((p, g, decisions))
}
