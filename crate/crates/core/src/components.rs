//! Maximal C-components and hedge witnesses.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{GraphError, GraphJson, Smg, VarSet};

/// Partition of a graph's vertices into bidirected-connected blocks,
/// ordered by each block's earliest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CComponentPartition {
    blocks: Vec<VarSet>,
}

impl CComponentPartition {
    pub fn blocks(&self) -> &[VarSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block containing `v`.
    pub fn block_of(&self, v: &str) -> Option<&VarSet> {
        self.blocks.iter().find(|b| b.contains(v))
    }

    /// True if some block equals `s` as a set.
    pub fn contains_block(&self, s: &VarSet) -> bool {
        self.blocks.iter().any(|b| b == s)
    }
}

pub fn maximal_c_components(g: &Smg) -> CComponentPartition {
    let n = g.len();
    let mut assigned = vec![false; n];
    let mut blocks = Vec::new();
    let siblings: Vec<Vec<usize>> = (0..n).map(|i| g.sibling_indices(i).to_vec()).collect();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let marks = g.closure(&[start], &[&siblings]);
        for (i, &m) in marks.iter().enumerate() {
            assigned[i] |= m;
        }
        blocks.push(g.collect(&marks));
    }
    CComponentPartition { blocks }
}

/// A pair of R-rooted C-forests `(F, F')` certifying non-identifiability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgeWitness {
    pub f: Smg,
    pub f_prime: Smg,
    pub roots: VarSet,
}

#[derive(Serialize)]
struct HedgeJson {
    f: GraphJson,
    f_prime: GraphJson,
    roots: Vec<String>,
}

impl Serialize for HedgeWitness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HedgeJson {
            f: (&self.f).into(),
            f_prime: (&self.f_prime).into(),
            roots: self.roots.iter().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl HedgeWitness {
    /// Checks the structural conditions a hedge must satisfy; returns a
    /// description of the first violation.
    pub fn validate(&self, x: &VarSet) -> Result<(), String> {
        for (name, forest) in [("F", &self.f), ("F'", &self.f_prime)] {
            if maximal_c_components(forest).len() != 1 {
                return Err(format!("{name} is not a single C-component"));
            }
            if let Some(i) = (0..forest.len()).find(|&i| forest.child_indices(i).len() > 1) {
                let v = &forest.vertices()[i];
                return Err(format!("{v} has more than one child in {name}"));
            }
            if forest.root_set() != self.roots {
                return Err(format!("{name} does not have the shared root set"));
            }
        }
        let fv = self.f.vertices();
        let fpv = self.f_prime.vertices();
        if !fpv.iter().all(|v| fv.contains(v)) {
            return Err("F' is not contained in F".into());
        }
        for (a, b) in self.f_prime.directed_edges() {
            if !self.f.has_directed(a, b) {
                return Err(format!("edge {a} -> {b} of F' missing from F"));
            }
        }
        for (a, b) in self.f_prime.bidirected_edges() {
            if !self.f.has_bidirected(a, b) {
                return Err(format!("edge {a} <-> {b} of F' missing from F"));
            }
        }
        if !fv.iter().any(|v| x.contains(v)) {
            return Err("F does not meet the intervention set".into());
        }
        if fpv.iter().any(|v| x.contains(v)) {
            return Err("F' meets the intervention set".into());
        }
        Ok(())
    }
}

/// Builds a witness in the state where `g` is a single C-component and so
/// is `g[s]`, where `s` is the complement of the intervention set.
///
/// `F'` keeps every bidirected edge of `g[s]` and, for each non-root vertex,
/// one child edge found by a backward search from the root set `R` of
/// `g[s]`. `F` adds the vertices of `x`, each with one child edge leading
/// into the part already built, plus all bidirected edges of `g`.
pub fn make_hedge_witness(g: &Smg, s: &VarSet) -> Result<HedgeWitness, GraphError> {
    let sub = g.induced_subgraph(s)?;
    let roots = sub.root_set();
    let in_s = g.mask(s)?;

    let n = g.len();
    let mut child_of: Vec<Option<usize>> = vec![None; n];
    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in g.indices(&roots)? {
        reached[i] = true;
        queue.push_back(i);
    }
    // First pass stays inside S; second pass extends into X.
    for allow_outside in [false, true] {
        if allow_outside {
            queue.extend((0..n).filter(|&i| reached[i]));
        }
        while let Some(v) = queue.pop_front() {
            for &p in g.parent_indices(v) {
                if reached[p] || (!allow_outside && !in_s[p]) {
                    continue;
                }
                reached[p] = true;
                child_of[p] = Some(v);
                queue.push_back(p);
            }
        }
    }
    debug_assert!(
        reached.iter().all(|&r| r),
        "every vertex must reach the root set"
    );

    let names = g.vertices();
    let edges = |keep: &dyn Fn(usize) -> bool| -> Vec<(String, String)> {
        (0..n)
            .filter(|&i| keep(i))
            .filter_map(|i| child_of[i].map(|c| (names[i].clone(), names[c].clone())))
            .collect()
    };
    let f_prime = Smg::new(
        s.iter().cloned(),
        edges(&|i| in_s[i]),
        sub.bidirected_edges()
            .map(|(a, b)| (a.to_string(), b.to_string())),
    )?;
    let f = Smg::new(
        names.iter().cloned(),
        edges(&|_| true),
        g.bidirected_edges()
            .map(|(a, b)| (a.to_string(), b.to_string())),
    )?;
    Ok(HedgeWitness { f, f_prime, roots })
}
