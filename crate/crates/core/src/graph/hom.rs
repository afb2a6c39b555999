use serde::{Deserialize, Serialize};

use super::{DiGraph, GraphError};
use crate::search::{Csp, Next, Order, RelBits};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Vertices in ascending order, candidates in ascending order; the
    /// returned witness is the lexicographically first one.
    #[default]
    Deterministic,
    /// Smallest-domain-first. Existence answers agree with the deterministic
    /// mode; the witness may differ.
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of node expansions before giving up.
    pub budget: u64,
    pub mode: SearchMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            mode: SearchMode::Deterministic,
        }
    }
}

/// A vertex map `source -> target`; `map[v]` is the image of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    /// Checks every source edge lands on a target edge.
    pub fn verify(&self, source: &DiGraph, target: &DiGraph) -> bool {
        self.map.len() == source.vertex_count()
            && self.map.iter().all(|&v| v < target.vertex_count())
            && source
                .edges()
                .iter()
                .all(|&(a, b)| target.has_edge(self.map[a], self.map[b]))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.map.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

fn search(g: &DiGraph, h: &DiGraph, cfg: &SearchConfig, injective: bool) -> Result<Option<Homomorphism>, GraphError> {
    let target = RelBits::new(h);
    let mut csp = Csp::new(g.vertex_count(), h.vertex_count(), vec![&target]).injective(injective);
    for &(a, b) in g.edges() {
        csp.constrain(0, a, b);
    }
    let order = match cfg.mode {
        SearchMode::Deterministic => Order::Static((0..g.vertex_count()).collect()),
        SearchMode::Fast => Order::MinDomain,
    };
    let mut found = None;
    csp.run(order, cfg.budget, |assignment| {
        found = Some(assignment.to_vec());
        Next::Stop
    })
    .map_err(|_| GraphError::BudgetExceeded(cfg.budget))?;
    let hom = found.map(|map| Homomorphism { map });
    if let Some(hom) = &hom {
        assert!(hom.verify(g, h), "search returned an invalid homomorphism");
        assert!(!injective || hom.is_injective());
    }
    Ok(hom)
}

/// Finds a graph homomorphism `g -> h`.
pub fn find_hom(g: &DiGraph, h: &DiGraph, cfg: &SearchConfig) -> Result<Option<Homomorphism>, GraphError> {
    search(g, h, cfg, false)
}

/// Finds an injective homomorphism `g -> h`, i.e. a copy of `g` inside a
/// subgraph of `h`.
pub fn find_embedding(g: &DiGraph, h: &DiGraph, cfg: &SearchConfig) -> Result<Option<Homomorphism>, GraphError> {
    search(g, h, cfg, true)
}
