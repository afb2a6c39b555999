//! Primitive-positive definitions presented as gadgets, and pp-powers.
//!
//! A gadget is a pattern graph whose edges carry a slot index. Evaluated on
//! input graphs `G_0, ..., G_{s-1}` over a common vertex set `V`, it defines
//! the relation of all images of its distinguished vertices under maps
//! `U -> V` that send every slot-`i` edge onto an edge of `G_i`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::DiGraph;
use crate::search::{BudgetExceeded, Csp, Next, Order, RelBits};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpError {
    #[error("gadget has {expected} slots but {got} input graphs were given")]
    SlotMismatch { expected: usize, got: usize },
    #[error("input graphs do not share one vertex set")]
    UniverseMismatch,
    #[error("search budget of {0} node expansions exhausted")]
    BudgetExceeded(u64),
    #[error("arity {arity} is not divisible by {power}")]
    ArityNotDivisible { arity: usize, power: usize },
    #[error("universe of size {size}^{power} does not fit in memory")]
    UniverseTooLarge { size: usize, power: usize },
    #[error("invalid gadget: {0}")]
    InvalidGadget(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
}

/// A `k`-ary relation on `0..universe_size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationJson")]
pub struct Relation {
    universe_size: usize,
    arity: usize,
    tuples: BTreeSet<Vec<usize>>,
}

#[derive(Deserialize)]
struct RelationJson {
    universe_size: usize,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl TryFrom<RelationJson> for Relation {
    type Error = PpError;

    fn try_from(j: RelationJson) -> Result<Self, PpError> {
        Relation::new(j.universe_size, j.arity, j.tuples)
    }
}

impl Relation {
    pub fn new(
        universe_size: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, PpError> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(PpError::InvalidRelation(format!("tuple {t:?} does not have arity {arity}")));
            }
            if t.iter().any(|&x| x >= universe_size) {
                return Err(PpError::InvalidRelation(format!("tuple {t:?} leaves 0..{universe_size}")));
            }
            set.insert(t);
        }
        Ok(Relation {
            universe_size,
            arity,
            tuples: set,
        })
    }

    pub fn empty(universe_size: usize, arity: usize) -> Self {
        Relation {
            universe_size,
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// Every `arity`-tuple over the universe.
    pub fn full(universe_size: usize, arity: usize) -> Self {
        let total = universe_size.pow(arity as u32);
        let tuples = (0..total).map(|code| decode(code, universe_size, arity)).collect();
        Relation {
            universe_size,
            arity,
            tuples,
        }
    }

    /// The edge set of `g` as a binary relation.
    pub fn from_graph(g: &DiGraph) -> Self {
        Relation {
            universe_size: g.vertex_count(),
            arity: 2,
            tuples: g.edges().iter().map(|&(a, b)| vec![a, b]).collect(),
        }
    }

    /// Reads a binary relation as a graph.
    pub fn to_graph(&self) -> Option<DiGraph> {
        (self.arity == 2).then(|| {
            DiGraph::from_edges(self.universe_size, self.tuples.iter().map(|t| (t[0], t[1])))
                .expect("tuples are in range")
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = &[usize]> {
        self.tuples.iter().map(Vec::as_slice)
    }

    /// Keeps the listed coordinates, in the given order.
    pub fn project(&self, coords: &[usize]) -> Relation {
        Relation {
            universe_size: self.universe_size,
            arity: coords.len(),
            tuples: self
                .tuples
                .iter()
                .map(|t| coords.iter().map(|&c| t[c]).collect())
                .collect(),
        }
    }
}

fn decode(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    out
}

/// A pp-formula over binary relations in graph form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GadgetJson", into = "GadgetJson")]
pub struct Gadget {
    vertex_count: usize,
    typed_edges: Vec<(usize, usize, usize)>,
    distinguished: Vec<usize>,
    slot_count: usize,
}

#[derive(Serialize, Deserialize)]
struct GadgetJson {
    vertices: usize,
    edges: Vec<[usize; 3]>,
    distinguished: Vec<usize>,
    slots: usize,
}

impl TryFrom<GadgetJson> for Gadget {
    type Error = PpError;

    fn try_from(j: GadgetJson) -> Result<Self, PpError> {
        Gadget::new(
            j.vertices,
            j.edges.into_iter().map(|[t, a, b]| (t, a, b)).collect(),
            j.distinguished,
            j.slots,
        )
    }
}

impl From<Gadget> for GadgetJson {
    fn from(g: Gadget) -> Self {
        GadgetJson {
            vertices: g.vertex_count,
            edges: g.typed_edges.iter().map(|&(t, a, b)| [t, a, b]).collect(),
            distinguished: g.distinguished,
            slots: g.slot_count,
        }
    }
}

impl Gadget {
    /// `typed_edges` holds `(slot, a, b)` triples. Distinguished vertices may
    /// repeat, which expresses equality of output coordinates.
    pub fn new(
        vertex_count: usize,
        typed_edges: Vec<(usize, usize, usize)>,
        distinguished: Vec<usize>,
        slot_count: usize,
    ) -> Result<Self, PpError> {
        for &(t, a, b) in &typed_edges {
            if t >= slot_count {
                return Err(PpError::InvalidGadget(format!("edge type {t} has no slot")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(PpError::InvalidGadget(format!("edge ({a}, {b}) out of range")));
            }
        }
        if let Some(&d) = distinguished.iter().find(|&&d| d >= vertex_count) {
            return Err(PpError::InvalidGadget(format!("distinguished vertex {d} out of range")));
        }
        Ok(Gadget {
            vertex_count,
            typed_edges,
            distinguished,
            slot_count,
        })
    }

    /// A single-slot gadget whose pattern is `g`.
    pub fn from_graph(g: &DiGraph, distinguished: Vec<usize>) -> Result<Self, PpError> {
        let edges = g.edges().iter().map(|&(a, b)| (0, a, b)).collect();
        Gadget::new(g.vertex_count(), edges, distinguished, 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn typed_edges(&self) -> &[(usize, usize, usize)] {
        &self.typed_edges
    }

    pub fn distinguished(&self) -> &[usize] {
        &self.distinguished
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn arity(&self) -> usize {
        self.distinguished.len()
    }

    /// Distinct distinguished vertices first, then the remaining vertices
    /// greedily by number of edges to vertices already placed.
    fn search_order(&self) -> (Vec<usize>, usize) {
        let mut order: Vec<usize> = Vec::new();
        let mut placed = vec![false; self.vertex_count];
        for &d in &self.distinguished {
            if !placed[d] {
                placed[d] = true;
                order.push(d);
            }
        }
        let outer = order.len();
        let mut links = vec![0usize; self.vertex_count];
        let bump = |links: &mut Vec<usize>, v: usize| {
            for &(_, a, b) in &self.typed_edges {
                if a == v && b != v {
                    links[b] += 1;
                } else if b == v && a != v {
                    links[a] += 1;
                }
            }
        };
        for &v in &order {
            bump(&mut links, v);
        }
        while order.len() < self.vertex_count {
            let next = (0..self.vertex_count)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| (links[v], std::cmp::Reverse(v)))
                .expect("unplaced vertex");
            placed[next] = true;
            order.push(next);
            bump(&mut links, next);
        }
        (order, outer)
    }

    fn check_inputs(&self, inputs: &[&DiGraph]) -> Result<usize, PpError> {
        if inputs.len() != self.slot_count {
            return Err(PpError::SlotMismatch {
                expected: self.slot_count,
                got: inputs.len(),
            });
        }
        let universe = inputs.first().map(|g| g.vertex_count());
        if inputs.iter().any(|g| Some(g.vertex_count()) != universe) {
            return Err(PpError::UniverseMismatch);
        }
        universe.ok_or_else(|| {
            PpError::InvalidGadget("a gadget without slots has no universe; add an empty slot".into())
        })
    }
}

fn build_csp<'a>(gadget: &Gadget, universe: usize, bits: &'a [RelBits]) -> Csp<'a> {
    let mut csp = Csp::new(gadget.vertex_count, universe, bits.iter().collect());
    for &(t, a, b) in &gadget.typed_edges {
        csp.constrain(t, a, b);
    }
    csp
}

/// All tuples of the relation the gadget defines over `inputs`.
pub fn evaluate(gadget: &Gadget, inputs: &[&DiGraph], budget: u64) -> Result<Relation, PpError> {
    let universe = gadget.check_inputs(inputs)?;
    let bits: Vec<RelBits> = inputs.iter().map(|g| RelBits::new(g)).collect();
    let csp = build_csp(gadget, universe, &bits);
    let (order, outer) = gadget.search_order();
    let mut tuples = BTreeSet::new();
    csp.run(Order::Static(order), budget, |assignment| {
        tuples.insert(gadget.distinguished.iter().map(|&d| assignment[d]).collect());
        Next::ResumeAt(outer)
    })
    .map_err(|BudgetExceeded| PpError::BudgetExceeded(budget))?;
    Ok(Relation {
        universe_size: universe,
        arity: gadget.arity(),
        tuples,
    })
}

/// A full assignment `U -> V` realising `tuple`, if the tuple is in the
/// defined relation.
pub fn find_witness(
    gadget: &Gadget,
    inputs: &[&DiGraph],
    tuple: &[usize],
    budget: u64,
) -> Result<Option<Vec<usize>>, PpError> {
    let universe = gadget.check_inputs(inputs)?;
    if tuple.len() != gadget.arity() {
        return Err(PpError::InvalidRelation(format!(
            "tuple {tuple:?} does not have arity {}",
            gadget.arity()
        )));
    }
    let bits: Vec<RelBits> = inputs.iter().map(|g| RelBits::new(g)).collect();
    let mut csp = build_csp(gadget, universe, &bits);
    for (&d, &value) in gadget.distinguished.iter().zip(tuple) {
        csp.pin(d, value);
    }
    let (order, _) = gadget.search_order();
    let mut found = None;
    csp.run(Order::Static(order), budget, |assignment| {
        found = Some(assignment.to_vec());
        Next::Stop
    })
    .map_err(|BudgetExceeded| PpError::BudgetExceeded(budget))?;
    Ok(found)
}

/// Reads a `(k*l)`-ary relation as a `k`-ary relation on the `l`-th power of
/// the universe. An `l`-tuple `(a_1, ..., a_l)` is encoded in mixed radix
/// with `a_1` most significant.
pub fn pp_power(r: &Relation, l: usize) -> Result<Relation, PpError> {
    if l == 0 || !r.arity.is_multiple_of(l) {
        return Err(PpError::ArityNotDivisible {
            arity: r.arity,
            power: l,
        });
    }
    let size = r
        .universe_size
        .checked_pow(l as u32)
        .filter(|s| *s <= 1 << 24)
        .ok_or(PpError::UniverseTooLarge {
            size: r.universe_size,
            power: l,
        })?;
    let encode = |chunk: &[usize]| chunk.iter().fold(0, |acc, &x| acc * r.universe_size + x);
    let tuples = r
        .tuples
        .iter()
        .map(|t| t.chunks(l).map(encode).collect())
        .collect();
    Ok(Relation {
        universe_size: size,
        arity: r.arity / l,
        tuples,
    })
}

/// Inverse of [`pp_power`]: expands each coordinate over `base^l` into `l`
/// coordinates over `base`.
pub fn flatten_power(r: &Relation, base: usize, l: usize) -> Result<Relation, PpError> {
    if base.checked_pow(l as u32) != Some(r.universe_size) {
        return Err(PpError::InvalidRelation(format!(
            "universe {} is not {base}^{l}",
            r.universe_size
        )));
    }
    let tuples = r
        .tuples
        .iter()
        .map(|t| t.iter().flat_map(|&x| decode(x, base, l)).collect())
        .collect();
    Ok(Relation {
        universe_size: base,
        arity: r.arity * l,
        tuples,
    })
}
