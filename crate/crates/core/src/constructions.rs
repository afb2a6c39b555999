//! The gadgets behind the two reductions between unoriented loop conditions,
//! and brute-force checks of the facts those reductions rely on.
//!
//! Odd cycles: the `k`-walk graph of a `k²`-cycle contains a `k`-cycle on
//! the vertices `0, k, 2k, ...`.
//!
//! Cliques: on a symmetric graph `G` and for `n >= 3`,
//!
//! ```text
//! R(u,v,x,y) <=> ∃ x_1..x_{n-2}, w:  x_i pairwise adjacent,
//!                every x_i adjacent to x, y, v and w,
//!                G(u,w), G(w,x), G(v,y)
//! F(x,y)     <=> ∃ u: R(u,u,x,y)
//! S(u1,u2,v1,v2) <=> ∃ x_1..x_{n+1}: F(x_i,x_j) for i != j except {1,2} and {3,4},
//!                R(u1,v1,x_1,x_2), R(u2,v2,x_3,x_4)
//! Q((u1,u2),(v1,v2)) <=> S(u1,u2,v1,v2)      (a graph on V²)
//! ```

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{clique, cycle, find_embedding, find_hom, DiGraph, GraphError, Homomorphism, SearchConfig};
use crate::ppdef::{evaluate, find_witness, pp_power, Gadget, PpError, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("input graph must be symmetric")]
    NotSymmetric,
    #[error("clique size must be at least 3, got {0}")]
    CliqueTooSmall(usize),
    #[error("cycle length must be odd and at least 3, got {0}")]
    BadCycleLength(usize),
    #[error("instance of size {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error(transparent)]
    Pp(#[from] PpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Search budget used by the gadget evaluations in this module.
pub const CONSTRUCTION_BUDGET: u64 = 200_000_000;

/// Relational product: `(a, c)` iff `(a, b) ∈ first` and `(b, c) ∈ second`.
pub fn compose(first: &DiGraph, second: &DiGraph) -> DiGraph {
    assert_eq!(first.vertex_count(), second.vertex_count(), "graphs must share a vertex set");
    let n = first.vertex_count();
    let mut edges = Vec::new();
    for &(a, b) in first.edges() {
        edges.extend(second.out_neighbors(b).map(|c| (a, c)));
    }
    DiGraph::from_edges(n, edges).expect("in range")
}

/// `(x, y)` iff `g` has a directed walk of exactly `k` edges from `x` to
/// `y`. `k = 0` gives the diagonal.
pub fn walk_relation(g: &DiGraph, k: usize) -> DiGraph {
    let n = g.vertex_count();
    let mut out = DiGraph::from_edges(n, (0..n).map(|v| (v, v))).expect("in range");
    for _ in 0..k {
        out = compose(&out, g);
    }
    out
}

fn require_clique_input(g: &DiGraph, n: usize) -> Result<(), ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::CliqueTooSmall(n));
    }
    if !g.is_symmetric() {
        return Err(ConstructionError::NotSymmetric);
    }
    Ok(())
}

/// Appends the body of `R(u, v, x, y)` over slot `slot`, allocating its
/// `n - 1` existential vertices from `next`. Returns the new vertex count.
fn push_r_body(
    edges: &mut Vec<(usize, usize, usize)>,
    slot: usize,
    [u, v, x, y]: [usize; 4],
    n: usize,
    next: usize,
) -> usize {
    let w = next;
    let inner: Vec<usize> = (next + 1..next + 1 + (n - 2)).collect();
    for (i, &a) in inner.iter().enumerate() {
        for &b in &inner[i + 1..] {
            edges.push((slot, a, b));
        }
        for t in [x, y, v, w] {
            edges.push((slot, a, t));
        }
    }
    edges.extend([(slot, u, w), (slot, w, x), (slot, v, y)]);
    next + n - 1
}

/// Gadget for `R(u,v,x,y)`: vertices `0..4` are `u, v, x, y`, then `w`,
/// then `x_1..x_{n-2}`.
pub fn r_gadget(n: usize) -> Gadget {
    let mut edges = Vec::new();
    let count = push_r_body(&mut edges, 0, [0, 1, 2, 3], n, 4);
    Gadget::new(count, edges, vec![0, 1, 2, 3], 1).expect("well-formed")
}

/// Gadget for `S(u1,u2,v1,v2)` over slots `[G, F]`: vertices `0..4` are
/// `u1, u2, v1, v2`, then `x_1..x_{n+1}`, then the two `R` bodies.
pub fn s_gadget(n: usize) -> Gadget {
    let xs: Vec<usize> = (4..4 + n + 1).collect();
    let mut edges = Vec::new();
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let skipped = matches!((i.min(j), i.max(j)), (0, 1) | (2, 3));
            if i != j && !skipped {
                edges.push((1, xs[i], xs[j]));
            }
        }
    }
    let next = 4 + n + 1;
    let next = push_r_body(&mut edges, 0, [0, 2, xs[0], xs[1]], n, next);
    let count = push_r_body(&mut edges, 0, [1, 3, xs[2], xs[3]], n, next);
    Gadget::new(count, edges, vec![0, 1, 2, 3], 2).expect("well-formed")
}

pub fn clique_r(g: &DiGraph, n: usize) -> Result<Relation, ConstructionError> {
    require_clique_input(g, n)?;
    Ok(evaluate(&r_gadget(n), &[g], CONSTRUCTION_BUDGET)?)
}

/// `F(x, y) <=> ∃u R(u, u, x, y)`.
pub fn clique_f(g: &DiGraph, n: usize) -> Result<DiGraph, ConstructionError> {
    let r = clique_r(g, n)?;
    let edges = r.tuples().filter(|t| t[0] == t[1]).map(|t| (t[2], t[3]));
    Ok(DiGraph::from_edges(g.vertex_count(), edges)?)
}

/// The 4-ary `S` in coordinate order `(u1, u2, v1, v2)`.
pub fn clique_s(g: &DiGraph, n: usize) -> Result<Relation, ConstructionError> {
    let f = clique_f(g, n)?;
    Ok(evaluate(&s_gadget(n), &[g, &f], CONSTRUCTION_BUDGET)?)
}

/// `Q` on `V²`; the pair `(a, b)` is vertex `a * |V| + b`.
pub fn clique_q(g: &DiGraph, n: usize) -> Result<DiGraph, ConstructionError> {
    let s = clique_s(g, n)?;
    let q = pp_power(&s, 2)?;
    Ok(q.to_graph().expect("binary"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// Named pass/fail checks. Serialises as
/// `{"checks": [{"name", "pass", "witness"?}], "all_pass": bool}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: &str, pass: bool, witness: Option<Value>) {
        self.checks.push(Check {
            name: name.to_owned(),
            pass,
            witness,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

impl Serialize for Report {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Report", 2)?;
        st.serialize_field("checks", &self.checks)?;
        st.serialize_field("all_pass", &self.all_pass())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyLimits {
    /// Largest cycle length `k²` the cycle check may build.
    pub max_cycle_size: usize,
    /// Largest clique size `n` for the clique claims.
    pub max_clique_n: usize,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        VerifyLimits {
            max_cycle_size: 121,
            max_clique_n: 4,
        }
    }
}

/// Checks for odd `k >= 3`: the `k²`-cycle maps to the `(k+2)`-cycle, and the
/// `k`-walk graph of the `k²`-cycle has a loopless `k`-cycle on
/// `0, k, ..., k(k-1)`.
pub fn verify_cycle_reduction(k: usize, limits: &VerifyLimits) -> Result<Report, ConstructionError> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(ConstructionError::BadCycleLength(k));
    }
    let size = k * k;
    if size > limits.max_cycle_size {
        return Err(ConstructionError::SizeCap {
            size,
            cap: limits.max_cycle_size,
        });
    }
    let cfg = SearchConfig::default();
    let big = cycle(size);
    let mut report = Report::default();

    let hom = find_hom(&big, &cycle(k + 2), &cfg)?;
    report.push(
        &format!("cycle_{size}_maps_to_cycle_{}", k + 2),
        hom.is_some(),
        hom.map(|h| json!(h.map)),
    );

    let walks = walk_relation(&big, k);
    let sample: Vec<usize> = (0..k).map(|i| i * k).collect();
    let missing: Vec<(usize, usize)> = (0..k)
        .map(|i| (sample[i], sample[(i + 1) % k]))
        .filter(|&(a, b)| !(walks.has_edge(a, b) && walks.has_edge(b, a)))
        .collect();
    report.push(
        &format!("walk_graph_contains_cycle_{k}"),
        missing.is_empty(),
        Some(if missing.is_empty() { json!(sample) } else { json!({ "missing": missing }) }),
    );

    let loops: Vec<usize> = (0..size).filter(|&v| walks.has_edge(v, v)).collect();
    report.push("walk_graph_loopless", loops.is_empty(), (!loops.is_empty()).then(|| json!(loops)));
    Ok(report)
}

fn tuples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n * n * n * n).map(move |c| [c / (n * n * n), c / (n * n) % n, c / n % n, c % n])
}

fn all_hold(
    report: &mut Report,
    name: &str,
    mut candidates: impl Iterator<Item = Vec<usize>>,
    holds: impl Fn(&[usize]) -> bool,
) {
    let mut checked = 0usize;
    let failure = candidates.find(|t| {
        checked += 1;
        !holds(t)
    });
    match failure {
        None => report.push(name, true, Some(json!({ "checked": checked }))),
        Some(t) => report.push(name, false, Some(json!({ "counterexample": t }))),
    }
}

/// Finds `u` and a witness for `R(u, u, a, a)` and reads off the
/// `(n+1)`-clique `x_1..x_{n-2}, a, u, w` as a map `K_{n+1} -> g`.
fn unfold_f_loop(g: &DiGraph, n: usize, a: usize) -> Result<Option<Homomorphism>, ConstructionError> {
    let gadget = r_gadget(n);
    for u in 0..g.vertex_count() {
        if let Some(w) = find_witness(&gadget, &[g], &[u, u, a, a], CONSTRUCTION_BUDGET)? {
            // layout: u v x y w x_1..x_{n-2}
            let mut map = vec![w[2], w[0], w[4]];
            map.extend(&w[5..]);
            return Ok(Some(Homomorphism { map }));
        }
    }
    Ok(None)
}

/// Brute-force checks of the clique reduction on `K_n` and `K_{n+1}`.
pub fn verify_clique_claims(n: usize, limits: &VerifyLimits) -> Result<Report, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::CliqueTooSmall(n));
    }
    if n > limits.max_clique_n {
        return Err(ConstructionError::SizeCap {
            size: n,
            cap: limits.max_clique_n,
        });
    }
    let cfg = SearchConfig::default();
    let g = clique(n);
    let r = clique_r(&g, n)?;
    let f = clique_f(&g, n)?;
    let q = clique_q(&g, n)?;
    let mut report = Report::default();

    all_hold(
        &mut report,
        "r_sufficient_case_a",
        tuples(n)
            .filter(|&[u, v, x, y]| u != v && x == y && x != v)
            .map(Vec::from),
        |t| r.contains(t),
    );
    all_hold(
        &mut report,
        "r_sufficient_case_b",
        tuples(n)
            .filter(|&[u, v, x, y]| u == v && x == u && y != x)
            .map(Vec::from),
        |t| r.contains(t),
    );
    all_hold(
        &mut report,
        "f_holds_on_distinct_pairs",
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| vec![a, b])),
        |t| f.has_edge(t[0], t[1]),
    );
    report.push("f_symmetric", f.is_symmetric(), None);
    report.push("f_equals_clique_edges", f == g, Some(json!(f.edge_count())));

    let pairs = n * n;
    all_hold(
        &mut report,
        "q_relates_distinct_pairs",
        (0..pairs).flat_map(|p| (0..pairs).filter(move |&q| q != p).map(move |q| vec![p, q])),
        |t| q.has_edge(t[0], t[1]),
    );
    let big_clique = find_embedding(&clique(n + 1), &q, &cfg)?;
    report.push(
        &format!("q_contains_clique_{}", n + 1),
        pairs > n && big_clique.is_some(),
        big_clique.map(|h| json!(h.map)),
    );
    report.push("q_loopless_on_clique", !q.has_loop(), None);

    let larger = clique(n + 1);
    let f_larger = clique_f(&larger, n)?;
    let loop_at = (0..n + 1).find(|&a| f_larger.has_edge(a, a));
    report.push(
        &format!("f_has_loop_on_clique_{}", n + 1),
        loop_at.is_some(),
        loop_at.map(|a| json!(a)),
    );
    let unfolded = match loop_at {
        Some(a) => unfold_f_loop(&larger, n, a)?,
        None => None,
    };
    let ok = unfolded.as_ref().is_some_and(|h| h.verify(&clique(n + 1), &larger));
    report.push("f_loop_unfolds_to_clique", ok, unfolded.map(|h| json!(h.map)));
    Ok(report)
}
