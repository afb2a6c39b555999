//! Finite directed graphs, structural predicates and the standard families.

mod hom;

use std::collections::VecDeque;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hom::{find_embedding, find_hom, Homomorphism, SearchConfig, SearchMode, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("graph is not symmetric")]
    NotSymmetric,
    #[error("graph is not weakly connected")]
    NotWeaklyConnected,
    #[error("search budget of {0} node expansions exhausted")]
    BudgetExceeded(u64),
}

/// A directed graph on vertices `0..n`, edges kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct DiGraph {
    n: usize,
    labels: Option<Vec<String>>,
    edges: Vec<(usize, usize)>,
    adj: FixedBitSet,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<GraphJson> for DiGraph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        let g = DiGraph::from_edges(j.n, j.edges.into_iter().map(|[a, b]| (a, b)))?;
        match j.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

impl From<DiGraph> for GraphJson {
    fn from(g: DiGraph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            labels: g.labels,
        }
    }
}

impl DiGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        DiGraph {
            n,
            labels: None,
            edges: Vec::new(),
            adj: FixedBitSet::with_capacity(n * n),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut adj = FixedBitSet::with_capacity(n * n);
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::EdgeOutOfRange(a, b, n));
            }
            adj.insert(a * n + b);
        }
        let edges = adj.ones().map(|i| (i / n, i % n)).collect();
        Ok(DiGraph {
            n,
            labels: None,
            edges,
            adj,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LabelCount {
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Vertex name: its label, or `x<v>` for unlabeled graphs.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => format!("x{v}"),
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj.contains(a * self.n + b)
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&w| self.has_edge(v, w))
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(a, b)| self.has_edge(b, a))
    }

    /// Keeps exactly the reciprocated edges.
    pub fn symmetric_part(&self) -> DiGraph {
        let edges = self.edges.iter().copied().filter(|&(a, b)| self.has_edge(b, a));
        let mut g = DiGraph::from_edges(self.n, edges).expect("subset of valid edges");
        g.labels = self.labels.clone();
        g
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> DiGraph {
        let mut edges = Vec::new();
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate() {
                if self.has_edge(a, b) {
                    edges.push((i, j));
                }
            }
        }
        let mut g = DiGraph::from_edges(vertices.len(), edges).expect("indices in range");
        if let Some(labels) = &self.labels {
            g.labels = Some(vertices.iter().map(|&v| labels[v].clone()).collect());
        }
        g
    }

    fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            nb[a].push(b);
            if a != b {
                nb[b].push(a);
            }
        }
        nb
    }

    /// 2-colouring of every component. A loop makes the graph non-bipartite.
    pub fn is_bipartite(&self) -> Result<bool, GraphError> {
        if !self.is_symmetric() {
            return Err(GraphError::NotSymmetric);
        }
        if self.has_loop() {
            return Ok(false);
        }
        let nb = self.undirected_neighbors();
        let mut colour: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let c = colour[v].expect("queued vertices are coloured");
                for &w in &nb[v] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!c);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == c => return Ok(false),
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(true)
    }

    /// Length of the shortest odd cycle, loops counting as length 1;
    /// `None` iff the graph is bipartite.
    pub fn odd_girth(&self) -> Result<Option<usize>, GraphError> {
        if !self.is_symmetric() {
            return Err(GraphError::NotSymmetric);
        }
        if self.has_loop() {
            return Ok(Some(1));
        }
        let nb = self.undirected_neighbors();
        let mut best: Option<usize> = None;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &nb[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    } else if dist[w] == dist[v] {
                        // shortest odd closed walk through s has length 2d+1
                        let len = 2 * dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        Ok(best)
    }

    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let nb = self.undirected_neighbors();
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &nb[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Every vertex has in-degree and out-degree at least one.
    pub fn is_smooth(&self) -> bool {
        let mut has_in = vec![false; self.n];
        let mut has_out = vec![false; self.n];
        for &(a, b) in &self.edges {
            has_out[a] = true;
            has_in[b] = true;
        }
        has_in.iter().zip(&has_out).all(|(&i, &o)| i && o)
    }

    /// gcd of the net length (forward minus backward edges) of all closed
    /// walks in the underlying undirected graph.
    ///
    /// A homomorphism into the directed `k`-cycle exists iff `k` divides the
    /// result; `0` means every directed cycle is a target.
    pub fn algebraic_length(&self) -> Result<u64, GraphError> {
        if !self.is_weakly_connected() {
            return Err(GraphError::NotWeaklyConnected);
        }
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push((b, 1));
            adj[b].push((a, -1));
        }
        let mut potential: Vec<Option<i64>> = vec![None; self.n];
        if self.n > 0 {
            potential[0] = Some(0);
        }
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            let p = potential[v].expect("queued vertices have potentials");
            for &(w, step) in &adj[v] {
                if potential[w].is_none() {
                    potential[w] = Some(p + step);
                    queue.push_back(w);
                }
            }
        }
        let d = self.edges.iter().fold(0u64, |acc, &(a, b)| {
            let pa = potential[a].expect("connected");
            let pb = potential[b].expect("connected");
            gcd(acc, (pa + 1 - pb).unsigned_abs())
        });
        Ok(d)
    }

    /// Graphviz text. Symmetric graphs are written as an undirected `graph`
    /// with one `a -- b;` line per edge pair, others as a `digraph`.
    pub fn to_dot(&self) -> String {
        let name = |v: usize| match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        };
        let symmetric = self.is_symmetric();
        let mut out = String::from(if symmetric { "graph G {\n" } else { "digraph G {\n" });
        let mut touched = vec![false; self.n];
        for &(a, b) in &self.edges {
            touched[a] = true;
            touched[b] = true;
        }
        for v in (0..self.n).filter(|&v| !touched[v]) {
            let _ = writeln!(out, "  {};", name(v));
        }
        for &(a, b) in &self.edges {
            if symmetric {
                if a <= b {
                    let _ = writeln!(out, "  {} -- {};", name(a), name(b));
                }
            } else {
                let _ = writeln!(out, "  {} -> {};", name(a), name(b));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Symmetric `n`-cycle. `cycle(1)` is a single loop and `cycle(2)` a
/// symmetric edge.
pub fn cycle(n: usize) -> DiGraph {
    assert!(n >= 1, "cycle needs at least one vertex");
    let edges = (0..n).flat_map(|i| {
        let j = (i + 1) % n;
        [(i, j), (j, i)]
    });
    DiGraph::from_edges(n, edges).expect("in range")
}

/// Directed `n`-cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn directed_cycle(n: usize) -> DiGraph {
    assert!(n >= 1, "cycle needs at least one vertex");
    DiGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("in range")
}

/// Loopless complete symmetric graph.
pub fn clique(n: usize) -> DiGraph {
    let edges = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
    DiGraph::from_edges(n, edges).expect("in range")
}

/// Symmetric path on `n` vertices.
pub fn path(n: usize) -> DiGraph {
    assert!(n >= 1, "path needs at least one vertex");
    let edges = (1..n).flat_map(|i| [(i - 1, i), (i, i - 1)]);
    DiGraph::from_edges(n, edges).expect("in range")
}

/// The Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`.
pub fn petersen() -> DiGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        for (a, b) in [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)] {
            edges.push((a, b));
            edges.push((b, a));
        }
    }
    DiGraph::from_edges(10, edges).expect("in range")
}
