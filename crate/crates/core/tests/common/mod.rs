//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use idprune::components::maximal_c_components;
use idprune::corpus;
use idprune::expression::{canonicalize, parse_text, rename_bound, Expr};
use idprune::graph::{set, Smg, VarSet};
use idprune::identify::prune_connectors_in_order;
use idprune::oracle::{
    for_each_config, interventional_truncated, observational_joint, sample_scm, Assignment,
    Evaluator, ProbTable,
};
use itertools::Itertools;

/// Absolute tolerance for every numeric comparison.
pub const TOL: f64 = 1e-9;

pub fn vs(names: &[&str]) -> VarSet {
    set(names.iter().copied())
}

pub fn graph(text: &str) -> Smg {
    text.parse().expect("test graph parses")
}

pub fn expr(text: &str) -> Expr {
    parse_text(text).expect("test expression parses")
}

/// Equality up to factor order, conditioning order and bound-variable names.
pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    canonicalize(&rename_bound(a)) == canonicalize(&rename_bound(b))
}

/// The query each bundled graph is built for: `(graph, outcomes, interventions)`.
pub fn corpus_queries() -> Vec<(&'static str, VarSet, VarSet)> {
    corpus::GRAPHS
        .iter()
        .map(|(name, _)| {
            let (y, x) = match *name {
                "double_outcome" => (vs(&["Y1", "Y2"]), vs(&["X1", "X2"])),
                "projection_guard" | "projection_guard_latent" => (vs(&["Y"]), vs(&["X1", "X2"])),
                _ => (vs(&["Y"]), vs(&["X"])),
            };
            (*name, y, x)
        })
        .collect()
}

/// Every way to place each vertex in X, Y, Z or none, with X and Y nonempty.
pub fn disjoint_triples(vertices: &[String]) -> Vec<(VarSet, VarSet, VarSet)> {
    let n = vertices.len();
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let (mut x, mut y, mut z) = (VarSet::new(), VarSet::new(), VarSet::new());
        let mut c = code;
        for v in vertices {
            match c % 4 {
                1 => x.insert(v.clone()),
                2 => y.insert(v.clone()),
                3 => z.insert(v.clone()),
                _ => false,
            };
            c /= 4;
        }
        if !x.is_empty() && !y.is_empty() {
            out.push((x, y, z));
        }
    }
    out
}

/// One disjoint triple chosen by `code`: two bits per vertex select X, Y, Z
/// or none; the first and last vertices fill X and Y if they end up empty.
pub fn triple(vertices: &[String], code: u64) -> (VarSet, VarSet, VarSet) {
    let (mut x, mut y, mut z) = (VarSet::new(), VarSet::new(), VarSet::new());
    for (i, v) in vertices.iter().enumerate() {
        match (code >> (2 * i)) & 3 {
            1 => x.insert(v.clone()),
            2 => y.insert(v.clone()),
            3 => z.insert(v.clone()),
            _ => false,
        };
    }
    if x.is_empty() {
        let first = &vertices[0];
        y.shift_remove(first);
        z.shift_remove(first);
        x.insert(first.clone());
    }
    if y.is_empty() {
        let last = vertices
            .iter()
            .rev()
            .find(|v| !x.contains(*v) || x.len() > 1)
            .expect("two vertices");
        x.shift_remove(last);
        z.shift_remove(last);
        y.insert(last.clone());
    }
    (x, y, z)
}

/// Edge incidence for path enumeration: `(neighbour, arrowhead here, arrowhead there)`.
fn incidence(g: &Smg, v: &str) -> Vec<(String, bool, bool)> {
    let mut out = Vec::new();
    for (a, b) in g.directed_edges() {
        if a == v {
            out.push((b.to_string(), false, true));
        }
        if b == v {
            out.push((a.to_string(), true, false));
        }
    }
    for (a, b) in g.bidirected_edges() {
        if a == v {
            out.push((b.to_string(), true, true));
        }
        if b == v {
            out.push((a.to_string(), true, true));
        }
    }
    out
}

/// d-separation by listing every simple path and testing each inner vertex:
/// a collider blocks unless it or a descendant is conditioned on, any other
/// vertex blocks when conditioned on.
pub fn d_separated_by_paths(g: &Smg, x: &VarSet, y: &VarSet, z: &VarSet) -> bool {
    fn open_path_from(
        g: &Smg,
        path: &mut Vec<String>,
        head_in: bool,
        y: &VarSet,
        activating: &VarSet,
        z: &VarSet,
    ) -> bool {
        let here = path.last().expect("path is nonempty").clone();
        for (next, head_here, head_there) in incidence(g, &here) {
            if path.contains(&next) {
                continue;
            }
            if path.len() > 1 {
                let collider = head_in && head_here;
                let blocked = if collider {
                    !activating.contains(&here)
                } else {
                    z.contains(&here)
                };
                if blocked {
                    continue;
                }
            }
            if y.contains(&next) {
                return true;
            }
            path.push(next);
            let found = open_path_from(g, path, head_there, y, activating, z);
            path.pop();
            if found {
                return true;
            }
        }
        false
    }
    // Colliders with a conditioned descendant are exactly the ancestors of z.
    let activating: VarSet = g
        .vertices()
        .iter()
        .filter(|v| {
            let below = g.descendants(&set([v.as_str()])).expect("vertex exists");
            below.iter().any(|d| z.contains(d))
        })
        .cloned()
        .collect();
    !x.iter()
        .any(|s| open_path_from(g, &mut vec![s.clone()], false, y, &activating, z))
}

/// Loop-order independence of the connector rule on one query: the removed
/// set is the same under every ordering of the non-intervened vertices.
pub fn connector_order_invariant(g: &Smg, y: &VarSet, x: &VarSet) -> Result<(), String> {
    let candidates: Vec<String> = g
        .vertices()
        .iter()
        .filter(|v| !x.contains(*v))
        .cloned()
        .collect();
    let reference = prune_connectors_in_order(y, x, g, &candidates).map_err(|e| e.to_string())?;
    let k = candidates.len();
    for order in candidates.into_iter().permutations(k) {
        let removed = prune_connectors_in_order(y, x, g, &order).map_err(|e| e.to_string())?;
        if removed != reference {
            return Err(format!(
                "order {order:?} removes {removed:?}, expected {reference:?}"
            ));
        }
    }
    Ok(())
}

/// Largest cell-wise gap between the joint and the product over maximal
/// C-components `c` of `P_{v \ c}(c)`.
pub fn c_component_factorization_gap(g: &Smg, seed: u64) -> f64 {
    let model = sample_scm(g, seed, 2);
    let joint = observational_joint(&model).expect("small model");
    let vertices: Vec<String> = g.vertices().iter().cloned().collect();
    let blocks: Vec<Vec<String>> = maximal_c_components(g)
        .blocks()
        .iter()
        .map(|b| b.iter().cloned().collect())
        .collect();
    // Interventional tables keyed by block and intervened configuration.
    let tables: Vec<Vec<(Assignment, ProbTable)>> = blocks
        .iter()
        .map(|block| {
            let rest: Vec<&String> = vertices.iter().filter(|v| !block.contains(*v)).collect();
            let mut out = Vec::new();
            for_each_config(&vec![2; rest.len()], |cfg| {
                let x: Assignment = rest
                    .iter()
                    .map(|v| (*v).clone())
                    .zip(cfg.iter().copied())
                    .collect();
                let t = interventional_truncated(&model, &x, block).expect("valid intervention");
                out.push((x, t));
            });
            out
        })
        .collect();
    let mut worst: f64 = 0.0;
    for_each_config(joint.cardinalities(), |cfg| {
        let full = joint.assignment(cfg);
        let mut product = 1.0;
        for (block, entries) in blocks.iter().zip(&tables) {
            let (_, table) = entries
                .iter()
                .find(|(x, _)| x.iter().all(|(k, v)| full[k] == *v))
                .expect("every configuration is tabulated");
            let cell: Assignment = block.iter().map(|v| (v.clone(), full[v])).collect();
            product *= table.get(&cell).expect("cell exists");
        }
        worst = worst.max((product - joint.at(cfg)).abs());
    });
    worst
}

/// Largest gap between two expressions over every assignment of their
/// combined free variables, all binary.
pub fn expression_gap(a: &Expr, b: &Expr, joint: &ProbTable) -> f64 {
    let free: Vec<String> = a
        .free_vars()
        .into_iter()
        .chain(b.free_vars())
        .map(|v| v.to_string())
        .unique()
        .collect();
    let ea = Evaluator::new(a, joint).expect("evaluable");
    let eb = Evaluator::new(b, joint).expect("evaluable");
    let mut worst: f64 = 0.0;
    for_each_config(&vec![2; free.len()], |cfg| {
        let assignment: Assignment = free.iter().cloned().zip(cfg.iter().copied()).collect();
        let gap = (ea.eval(&assignment).expect("positive model")
            - eb.eval(&assignment).expect("positive model"))
        .abs();
        worst = worst.max(gap);
    });
    worst
}
