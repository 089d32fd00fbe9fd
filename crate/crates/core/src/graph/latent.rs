//! DAGs with explicitly latent vertices and their projection onto the
//! observed part.

use std::collections::BTreeSet;

use super::{GraphError, Smg, VarSet};

/// A DAG over observed and latent vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatentDag {
    dag: Smg,
    latent: VarSet,
}

impl LatentDag {
    /// `dag` must be purely directed and contain every latent vertex.
    pub fn new(dag: Smg, latent: VarSet) -> Result<Self, GraphError> {
        if dag.bidirected_edges().next().is_some() {
            return Err(GraphError::BidirectedInDag);
        }
        dag.indices(&latent)?;
        Ok(LatentDag { dag, latent })
    }

    pub fn graph(&self) -> &Smg {
        &self.dag
    }

    pub fn latent(&self) -> &VarSet {
        &self.latent
    }

    pub fn observed(&self) -> VarSet {
        self.dag
            .vertices()
            .iter()
            .filter(|v| !self.latent.contains(*v))
            .cloned()
            .collect()
    }

    /// Projects onto `observed`, which must equal [`LatentDag::observed`].
    pub fn project(&self, observed: &VarSet) -> Result<Smg, GraphError> {
        if *observed != self.observed() {
            return Err(GraphError::ProjectionTarget);
        }
        self.dag.latent_projection(observed)
    }
}

/// Edges between vertex indices.
type EdgeSet = BTreeSet<(usize, usize)>;

/// Index-level projection of a DAG given as child lists.
///
/// Returns directed pairs `(tail, head)` and bidirected pairs `(lo, hi)` over
/// the non-latent indices. A directed edge needs a directed path whose
/// interior is latent; a bidirected edge needs a latent vertex with such
/// paths into both endpoints.
pub(crate) fn project(children: &[Vec<usize>], is_latent: &[bool]) -> (EdgeSet, EdgeSet) {
    let total = children.len();
    let mut directed = BTreeSet::new();
    let mut bidirected = BTreeSet::new();

    let reach = |from: usize| -> Vec<usize> {
        let mut seen = vec![false; total];
        let mut stack = vec![from];
        let mut hits = Vec::new();
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                if is_latent[c] {
                    stack.push(c);
                } else {
                    hits.push(c);
                }
            }
        }
        hits.sort_unstable();
        hits
    };

    for (v, &latent) in is_latent.iter().enumerate() {
        let hits = reach(v);
        if latent {
            for (k, &a) in hits.iter().enumerate() {
                for &b in &hits[k + 1..] {
                    bidirected.insert((a, b));
                }
            }
        } else {
            for h in hits {
                if h != v {
                    directed.insert((v, h));
                }
            }
        }
    }
    (directed, bidirected)
}
