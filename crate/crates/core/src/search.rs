//! Backtracking search with forward checking over binary constraints.
//!
//! Variables range over `0..domain_size`. Each constraint says that the pair
//! `(value(a), value(b))` must be an edge of one of the target relations.
//! Shared by homomorphism search and gadget evaluation.

use fixedbitset::FixedBitSet;

use crate::graph::DiGraph;

/// Adjacency rows of a target graph, in both directions.
pub(crate) struct RelBits {
    out: Vec<FixedBitSet>,
    inn: Vec<FixedBitSet>,
    diag: FixedBitSet,
}

impl RelBits {
    pub(crate) fn new(g: &DiGraph) -> Self {
        let n = g.vertex_count();
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        let mut inn = vec![FixedBitSet::with_capacity(n); n];
        let mut diag = FixedBitSet::with_capacity(n);
        for &(a, b) in g.edges() {
            out[a].insert(b);
            inn[b].insert(a);
            if a == b {
                diag.insert(a);
            }
        }
        RelBits { out, inn, diag }
    }
}

#[derive(Clone, Copy)]
struct Arc {
    other: usize,
    rel: usize,
    // true: constraint is (self, other) ∈ rel; false: (other, self) ∈ rel
    forward: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BudgetExceeded;

/// What to do after a complete assignment has been reported.
pub(crate) enum Next {
    Stop,
    /// Keep the first `k` variables of the order and resume below them.
    ResumeAt(usize),
}

pub(crate) enum Order {
    Static(Vec<usize>),
    /// Smallest remaining domain first, ties to the lowest index.
    MinDomain,
}

pub(crate) struct Csp<'a> {
    vars: usize,
    domain_size: usize,
    rels: Vec<&'a RelBits>,
    arcs: Vec<Vec<Arc>>,
    self_loops: Vec<(usize, usize)>,
    pinned: Vec<(usize, usize)>,
    injective: bool,
}

impl<'a> Csp<'a> {
    pub(crate) fn new(vars: usize, domain_size: usize, rels: Vec<&'a RelBits>) -> Self {
        Csp {
            vars,
            domain_size,
            rels,
            arcs: vec![Vec::new(); vars],
            self_loops: Vec::new(),
            pinned: Vec::new(),
            injective: false,
        }
    }

    pub(crate) fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    /// Requires `(value(a), value(b)) ∈ rels[rel]`.
    pub(crate) fn constrain(&mut self, rel: usize, a: usize, b: usize) {
        if a == b {
            self.self_loops.push((rel, a));
        } else {
            self.arcs[a].push(Arc { other: b, rel, forward: true });
            self.arcs[b].push(Arc { other: a, rel, forward: false });
        }
    }

    /// Restricts `var` to the single value `value`.
    pub(crate) fn pin(&mut self, var: usize, value: usize) {
        self.pinned.push((var, value));
    }

    pub(crate) fn run<F>(&self, order: Order, budget: u64, mut on_solution: F) -> Result<(), BudgetExceeded>
    where
        F: FnMut(&[usize]) -> Next,
    {
        let mut full = FixedBitSet::with_capacity(self.domain_size);
        full.insert_range(..);
        let mut domains = vec![full; self.vars];
        for &(rel, v) in &self.self_loops {
            domains[v].intersect_with(&self.rels[rel].diag);
        }
        for &(v, value) in &self.pinned {
            let keep = value < self.domain_size && domains[v].contains(value);
            domains[v].clear();
            if keep {
                domains[v].insert(value);
            }
        }
        if self.injective && self.vars > self.domain_size {
            return Ok(());
        }
        if domains.iter().any(|d| d.is_clear()) && self.vars > 0 {
            return Ok(());
        }
        let mut state = State {
            csp: self,
            domains,
            assignment: vec![usize::MAX; self.vars],
            trail: Vec::new(),
            expansions: 0,
            budget,
            order,
        };
        state.dfs(0, &mut on_solution).map(|_| ())
    }
}

enum Signal {
    Exhausted,
    Unwind(usize),
}

struct State<'c, 'a> {
    csp: &'c Csp<'a>,
    domains: Vec<FixedBitSet>,
    assignment: Vec<usize>,
    trail: Vec<(usize, FixedBitSet)>,
    expansions: u64,
    budget: u64,
    order: Order,
}

impl State<'_, '_> {
    fn pick(&self, depth: usize) -> usize {
        match &self.order {
            Order::Static(order) => order[depth],
            Order::MinDomain => (0..self.csp.vars)
                .filter(|&v| self.assignment[v] == usize::MAX)
                .min_by_key(|&v| (self.domains[v].count_ones(..), v))
                .expect("an unassigned variable remains"),
        }
    }

    fn dfs<F>(&mut self, depth: usize, on_solution: &mut F) -> Result<Signal, BudgetExceeded>
    where
        F: FnMut(&[usize]) -> Next,
    {
        if depth == self.csp.vars {
            return Ok(match on_solution(&self.assignment) {
                Next::Stop => Signal::Unwind(0),
                Next::ResumeAt(k) => Signal::Unwind(k),
            });
        }
        let var = self.pick(depth);
        let candidates: Vec<usize> = self.domains[var].ones().collect();
        for value in candidates {
            self.expansions += 1;
            if self.expansions > self.budget {
                return Err(BudgetExceeded);
            }
            let mark = self.trail.len();
            self.assignment[var] = value;
            let consistent = self.propagate(var, value);
            let signal = if consistent {
                self.dfs(depth + 1, on_solution)?
            } else {
                Signal::Exhausted
            };
            self.assignment[var] = usize::MAX;
            while self.trail.len() > mark {
                let (v, old) = self.trail.pop().expect("trail entry");
                self.domains[v] = old;
            }
            if let Signal::Unwind(k) = signal {
                if depth >= k {
                    return Ok(Signal::Unwind(k));
                }
            }
        }
        Ok(Signal::Exhausted)
    }

    fn narrow(&mut self, v: usize, keep: impl FnOnce(&mut FixedBitSet)) -> bool {
        let before = self.domains[v].count_ones(..);
        let mut next = self.domains[v].clone();
        keep(&mut next);
        let after = next.count_ones(..);
        if after != before {
            let old = std::mem::replace(&mut self.domains[v], next);
            self.trail.push((v, old));
        }
        after > 0
    }

    fn propagate(&mut self, var: usize, value: usize) -> bool {
        let csp = self.csp;
        for arc in &csp.arcs[var] {
            if self.assignment[arc.other] != usize::MAX {
                let (a, b) = if arc.forward {
                    (value, self.assignment[arc.other])
                } else {
                    (self.assignment[arc.other], value)
                };
                if !csp.rels[arc.rel].out[a].contains(b) {
                    return false;
                }
                continue;
            }
            let rel = csp.rels[arc.rel];
            let row = if arc.forward { &rel.out[value] } else { &rel.inn[value] };
            if !self.narrow(arc.other, |d| d.intersect_with(row)) {
                return false;
            }
        }
        if csp.injective {
            for w in 0..csp.vars {
                if w != var && self.assignment[w] == usize::MAX && self.domains[w].contains(value) {
                    if !self.narrow(w, |d| d.set(value, false)) {
                        return false;
                    }
                } else if w != var && self.assignment[w] == value {
                    return false;
                }
            }
        }
        true
    }
}
