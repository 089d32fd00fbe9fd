//! d-separation over semi-Markovian graphs.
//!
//! A bidirected edge carries arrowheads at both ends. A vertex on a path is
//! a collider when both incident path edges point into it; colliders pass
//! only if they are ancestors of the conditioning set, non-colliders pass
//! only if they are outside it.

use thiserror::Error;

use crate::graph::{GraphError, Smg, VarSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex `{0}` appears in more than one of the sets")]
    Overlap(String),
    #[error("the separated sets must be nonempty")]
    EmptySet,
}

/// True iff `z` blocks every path between `x` and `y`.
pub fn d_separated(g: &Smg, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<bool, SeparationError> {
    if x.is_empty() || y.is_empty() {
        return Err(SeparationError::EmptySet);
    }
    for (a, b) in [(x, y), (x, z), (y, z)] {
        if let Some(v) = a.iter().find(|v| b.contains(*v)) {
            return Err(SeparationError::Overlap(v.clone()));
        }
    }
    let starts = g.indices(x)?;
    let targets = g.mask(y)?;
    let conditioned = g.mask(z)?;
    let ancestor_of_z = g.mask(&g.ancestors(z)?)?;

    // State: (vertex, whether the edge we arrived by points into it).
    let n = g.len();
    let mut seen = vec![[false; 2]; n];
    let mut stack: Vec<(usize, bool)> = Vec::new();
    for &s in &starts {
        for (next, edge) in incident(g, s) {
            stack.push((next, edge.head_at_far_end()));
        }
    }
    while let Some((v, head_in)) = stack.pop() {
        if seen[v][head_in as usize] {
            continue;
        }
        seen[v][head_in as usize] = true;
        if targets[v] {
            return Ok(false);
        }
        for (next, edge) in incident(g, v) {
            let collider = head_in && edge.head_at_near_end();
            let passes = if collider {
                ancestor_of_z[v]
            } else {
                !conditioned[v]
            };
            if passes {
                stack.push((next, edge.head_at_far_end()));
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy)]
enum Edge {
    Out,
    In,
    Bidirected,
}

impl Edge {
    fn head_at_far_end(self) -> bool {
        !matches!(self, Edge::In)
    }

    fn head_at_near_end(self) -> bool {
        !matches!(self, Edge::Out)
    }
}

/// Every edge touching `v`, parallel edges listed separately.
fn incident(g: &Smg, v: usize) -> impl Iterator<Item = (usize, Edge)> + '_ {
    let out = g.child_indices(v).iter().map(|&c| (c, Edge::Out));
    let inc = g.parent_indices(v).iter().map(|&p| (p, Edge::In));
    let bi = g.sibling_indices(v).iter().map(|&s| (s, Edge::Bidirected));
    out.chain(inc).chain(bi)
}
