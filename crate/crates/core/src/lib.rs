//! Loop conditions: single linear identities `t(u1,...,un) = t(v1,...,vn)`,
//! their assigned graphs, primitive-positive gadgets over graphs, and a
//! decision procedure for finite algebras.

pub mod algebra;
pub mod classify;
pub mod constructions;
pub mod graph;
pub mod identity;
pub mod ppdef;
mod search;

pub use algebra::{satisfies_condition, Decision, DecisionLimits, FiniteAlgebra, Term};
pub use classify::{classify, ConditionClass};
pub use constructions::Report;
pub use ppdef::{Gadget, Relation};

pub use graph::{DiGraph, GraphError, Homomorphism, SearchConfig, SearchMode};
pub use identity::{condition_graph, parse_condition, print_condition, LoopCondition, ParseError};
