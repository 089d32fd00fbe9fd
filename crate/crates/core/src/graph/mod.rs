//! Semi-Markovian graphs: directed acyclic structure over observed
//! variables plus bidirected edges standing for hidden common causes.
//!
//! Vertex sets are [`VarSet`]s (insertion-ordered). Every query returns its
//! result in the graph's own vertex order, so all downstream iteration is
//! deterministic.

mod format;
mod latent;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

/// Edges as name pairs.
type NamedEdges<'a> = BTreeSet<(&'a str, &'a str)>;

pub use format::{parse_graph, GraphSource, ParseError, ParsedGraph};
pub use latent::LatentDag;

/// Ordered set of vertex names. Equality ignores order.
pub type VarSet = IndexSet<String>;

/// Builds a [`VarSet`] from anything yielding names.
pub fn set<I, S>(items: I) -> VarSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("directed cycle through `{0}`")]
    Cycle(String),
    #[error("`{0}` is declared both latent and observed")]
    LatentOverlap(String),
    #[error("a latent DAG cannot contain bidirected edges")]
    BidirectedInDag,
    #[error("projection target must be exactly the observed vertex set")]
    ProjectionTarget,
}

/// Kinship relation selector for [`Smg::kin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kin {
    Parents,
    Children,
    Ancestors,
    Descendants,
}

/// Returns true if `name` matches `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A semi-Markovian graph. Immutable once built.
#[derive(Clone, Debug, Default)]
pub struct Smg {
    vertices: VarSet,
    directed: BTreeSet<(usize, usize)>,
    bidirected: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    siblings: Vec<Vec<usize>>,
}

/// Incremental constructor for [`Smg`]; validation happens in [`SmgBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct SmgBuilder {
    vertices: VarSet,
    directed: Vec<(usize, usize)>,
    bidirected: Vec<(usize, usize)>,
}

impl SmgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a vertex; a no-op if it already exists.
    pub fn vertex(&mut self, name: impl Into<String>) -> &mut Self {
        self.intern(name.into());
        self
    }

    pub fn directed(&mut self, tail: impl Into<String>, head: impl Into<String>) -> &mut Self {
        let t = self.intern(tail.into());
        let h = self.intern(head.into());
        self.directed.push((t, h));
        self
    }

    pub fn bidirected(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        let a = self.intern(a.into());
        let b = self.intern(b.into());
        self.bidirected.push((a, b));
        self
    }

    /// True if the edge was already added (used for duplicate warnings).
    pub fn has_directed(&self, tail: &str, head: &str) -> bool {
        match (
            self.vertices.get_index_of(tail),
            self.vertices.get_index_of(head),
        ) {
            (Some(t), Some(h)) => self.directed.contains(&(t, h)),
            _ => false,
        }
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        match (self.vertices.get_index_of(a), self.vertices.get_index_of(b)) {
            (Some(a), Some(b)) => {
                self.bidirected.contains(&(a, b)) || self.bidirected.contains(&(b, a))
            }
            _ => false,
        }
    }

    pub fn build(&self) -> Result<Smg, GraphError> {
        if let Some(bad) = self.vertices.iter().find(|v| !is_valid_name(v)) {
            return Err(GraphError::InvalidName(bad.clone()));
        }
        Smg::from_indices(
            self.vertices.clone(),
            self.directed.iter().copied(),
            self.bidirected.iter().copied(),
        )
    }

    fn intern(&mut self, name: String) -> usize {
        self.vertices.insert_full(name).0
    }
}

impl Smg {
    pub fn builder() -> SmgBuilder {
        SmgBuilder::new()
    }

    /// Builds a graph from name lists.
    pub fn new<V, S, D, B, A1, A2, B1, B2>(
        vertices: V,
        directed: D,
        bidirected: B,
    ) -> Result<Smg, GraphError>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
        D: IntoIterator<Item = (A1, A2)>,
        A1: Into<String>,
        A2: Into<String>,
        B: IntoIterator<Item = (B1, B2)>,
        B1: Into<String>,
        B2: Into<String>,
    {
        let mut builder = SmgBuilder::new();
        for v in vertices {
            builder.vertex(v);
        }
        for (t, h) in directed {
            builder.directed(t, h);
        }
        for (a, b) in bidirected {
            builder.bidirected(a, b);
        }
        builder.build()
    }

    pub(crate) fn from_indices(
        vertices: VarSet,
        directed: impl IntoIterator<Item = (usize, usize)>,
        bidirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Smg, GraphError> {
        let n = vertices.len();
        let mut g = Smg {
            vertices,
            directed: BTreeSet::new(),
            bidirected: BTreeSet::new(),
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            siblings: vec![Vec::new(); n],
        };
        for (t, h) in directed {
            if t == h {
                return Err(GraphError::SelfLoop(g.vertices[t].clone()));
            }
            g.directed.insert((t, h));
        }
        for (a, b) in bidirected {
            if a == b {
                return Err(GraphError::SelfLoop(g.vertices[a].clone()));
            }
            g.bidirected.insert((a.min(b), a.max(b)));
        }
        for &(t, h) in &g.directed {
            g.children[t].push(h);
            g.parents[h].push(t);
        }
        for &(a, b) in &g.bidirected {
            g.siblings[a].push(b);
            g.siblings[b].push(a);
        }
        for list in g
            .parents
            .iter_mut()
            .chain(&mut g.children)
            .chain(&mut g.siblings)
        {
            list.sort_unstable();
        }
        let order = g.topological_indices();
        if order.len() < n {
            let placed: BTreeSet<usize> = order.into_iter().collect();
            let stuck = (0..n).find(|i| !placed.contains(i)).unwrap_or(0);
            return Err(GraphError::Cycle(g.vertices[stuck].clone()));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &VarSet {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vertices.contains(name)
    }

    /// Directed edges as `(tail, head)`, ordered by vertex index.
    pub fn directed_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.directed
            .iter()
            .map(|&(t, h)| (self.vertices[t].as_str(), self.vertices[h].as_str()))
    }

    /// Bidirected edges, each reported once with the earlier vertex first.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.bidirected
            .iter()
            .map(|&(a, b)| (self.vertices[a].as_str(), self.vertices[b].as_str()))
    }

    pub fn has_directed(&self, tail: &str, head: &str) -> bool {
        match (self.index(tail), self.index(head)) {
            (Some(t), Some(h)) => self.directed.contains(&(t, h)),
            _ => false,
        }
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(a), Some(b)) => self.bidirected.contains(&(a.min(b), a.max(b))),
            _ => false,
        }
    }

    pub fn kin(&self, kind: Kin, w: &VarSet) -> Result<VarSet, GraphError> {
        let start = self.indices(w)?;
        let marks = match kind {
            Kin::Parents => self.step(&start, &self.parents),
            Kin::Children => self.step(&start, &self.children),
            Kin::Ancestors => self.closure(&start, &[&self.parents]),
            Kin::Descendants => self.closure(&start, &[&self.children]),
        };
        Ok(self.collect(&marks))
    }

    pub fn parents(&self, w: &VarSet) -> Result<VarSet, GraphError> {
        self.kin(Kin::Parents, w)
    }

    pub fn children(&self, w: &VarSet) -> Result<VarSet, GraphError> {
        self.kin(Kin::Children, w)
    }

    pub fn ancestors(&self, w: &VarSet) -> Result<VarSet, GraphError> {
        self.kin(Kin::Ancestors, w)
    }

    pub fn descendants(&self, w: &VarSet) -> Result<VarSet, GraphError> {
        self.kin(Kin::Descendants, w)
    }

    /// Vertices reachable from `w` ignoring edge direction and type, including `w`.
    pub fn connected(&self, w: &VarSet) -> Result<VarSet, GraphError> {
        let start = self.indices(w)?;
        let marks = self.closure(&start, &[&self.parents, &self.children, &self.siblings]);
        Ok(self.collect(&marks))
    }

    pub fn induced_subgraph(&self, w: &VarSet) -> Result<Smg, GraphError> {
        let keep = self.mask(w)?;
        let vertices: VarSet = self
            .vertices
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.clone())
            .collect();
        let remap = |i: usize| {
            vertices
                .get_index_of(&self.vertices[i])
                .expect("kept vertex")
        };
        let directed: Vec<_> = self
            .directed
            .iter()
            .filter(|&&(t, h)| keep[t] && keep[h])
            .map(|&(t, h)| (remap(t), remap(h)))
            .collect();
        let bidirected: Vec<_> = self
            .bidirected
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (remap(a), remap(b)))
            .collect();
        Smg::from_indices(vertices, directed, bidirected)
    }

    /// Removes directed edges into `bar`, directed edges out of `ubar`, and
    /// bidirected edges touching `bar`.
    pub fn mutilate(&self, bar: &VarSet, ubar: &VarSet) -> Result<Smg, GraphError> {
        let bar = self.mask(bar)?;
        let ubar = self.mask(ubar)?;
        let directed: Vec<_> = self
            .directed
            .iter()
            .copied()
            .filter(|&(t, h)| !bar[h] && !ubar[t])
            .collect();
        let bidirected: Vec<_> = self
            .bidirected
            .iter()
            .copied()
            .filter(|&(a, b)| !bar[a] && !bar[b])
            .collect();
        Smg::from_indices(self.vertices.clone(), directed, bidirected)
    }

    /// Vertices without children.
    pub fn root_set(&self) -> VarSet {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| self.children[*i].is_empty())
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Kahn's algorithm, always emitting the available vertex with the
    /// smallest insertion index.
    pub fn topological_order(&self) -> Vec<String> {
        self.topological_indices()
            .into_iter()
            .map(|i| self.vertices[i].clone())
            .collect()
    }

    /// Latent projection onto `keep`: every bidirected edge is expanded into
    /// a private latent parent and all other vertices become latent.
    pub fn latent_projection(&self, keep: &VarSet) -> Result<Smg, GraphError> {
        let keep_mask = self.mask(keep)?;
        let n = self.len();
        let total = n + self.bidirected.len();
        let mut children = self.children.clone();
        children.resize(total, Vec::new());
        for (k, &(a, b)) in self.bidirected.iter().enumerate() {
            children[n + k] = vec![a, b];
        }
        let mut is_latent: Vec<bool> = keep_mask.iter().map(|k| !k).collect();
        is_latent.resize(total, true);
        let (directed, bidirected) = latent::project(&children, &is_latent);

        let vertices: VarSet = self
            .vertices
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.clone())
            .collect();
        let remap = |i: usize| {
            vertices
                .get_index_of(&self.vertices[i])
                .expect("kept vertex")
        };
        Smg::from_indices(
            vertices.clone(),
            directed.into_iter().map(|(t, h)| (remap(t), remap(h))),
            bidirected.into_iter().map(|(a, b)| (remap(a), remap(b))),
        )
    }

    pub(crate) fn index(&self, name: &str) -> Option<usize> {
        self.vertices.get_index_of(name)
    }

    pub(crate) fn indices(&self, w: &VarSet) -> Result<Vec<usize>, GraphError> {
        w.iter()
            .map(|v| {
                self.index(v)
                    .ok_or_else(|| GraphError::UnknownVertex(v.clone()))
            })
            .collect()
    }

    pub(crate) fn mask(&self, w: &VarSet) -> Result<Vec<bool>, GraphError> {
        let mut mask = vec![false; self.len()];
        for i in self.indices(w)? {
            mask[i] = true;
        }
        Ok(mask)
    }

    pub(crate) fn collect(&self, marks: &[bool]) -> VarSet {
        self.vertices
            .iter()
            .zip(marks)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub(crate) fn parent_indices(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub(crate) fn child_indices(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub(crate) fn sibling_indices(&self, i: usize) -> &[usize] {
        &self.siblings[i]
    }

    fn step(&self, start: &[usize], adjacency: &[Vec<usize>]) -> Vec<bool> {
        let mut marks = vec![false; self.len()];
        for &i in start {
            marks[i] = true;
            for &j in &adjacency[i] {
                marks[j] = true;
            }
        }
        marks
    }

    pub(crate) fn closure(&self, start: &[usize], adjacency: &[&Vec<Vec<usize>>]) -> Vec<bool> {
        let mut marks = vec![false; self.len()];
        let mut stack: Vec<usize> = start.to_vec();
        for &i in start {
            marks[i] = true;
        }
        while let Some(i) = stack.pop() {
            for adj in adjacency {
                for &j in &adj[i] {
                    if !marks[j] {
                        marks[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        marks
    }

    fn topological_indices(&self) -> Vec<usize> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &c in &self.children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        order
    }

    fn edge_names(&self) -> (NamedEdges<'_>, NamedEdges<'_>) {
        let directed = self.directed_edges().collect();
        let bidirected = self
            .bidirected_edges()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        (directed, bidirected)
    }
}

/// Set equality of vertices, directed edges and bidirected edges.
pub fn graphs_equal(a: &Smg, b: &Smg) -> bool {
    a.vertices == b.vertices && a.edge_names() == b.edge_names()
}

impl PartialEq for Smg {
    fn eq(&self, other: &Self) -> bool {
        graphs_equal(self, other)
    }
}

impl Eq for Smg {}

/// Writes the graph in the text format: a declaration line with every
/// vertex in order, then one edge per line.
impl fmt::Display for Smg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        writeln!(f, "{}", names.join(" "))?;
        for (t, h) in self.directed_edges() {
            writeln!(f, "{t} -> {h}")?;
        }
        for (a, b) in self.bidirected_edges() {
            writeln!(f, "{a} <-> {b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Smg {
    type Err = ParseError;

    /// Parses the text format; latent DAGs are projected onto their observed vertices.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_graph(text)?.graph.into_smg()
    }
}

/// Edge-list form used in JSON output.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub directed: Vec<[String; 2]>,
    pub bidirected: Vec<[String; 2]>,
}

impl From<&Smg> for GraphJson {
    fn from(g: &Smg) -> Self {
        GraphJson {
            vertices: g.vertices.iter().cloned().collect(),
            directed: g
                .directed_edges()
                .map(|(t, h)| [t.into(), h.into()])
                .collect(),
            bidirected: g
                .bidirected_edges()
                .map(|(a, b)| [a.into(), b.into()])
                .collect(),
        }
    }
}
