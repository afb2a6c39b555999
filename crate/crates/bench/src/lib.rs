//! Shared inputs for the benchmarks.

use loopcond::graph::{clique, cycle};
use loopcond::{DiGraph, FiniteAlgebra, LoopCondition};

pub use loopcond;

/// Homomorphism instances `(name, source, target)`, all with a solution
/// except the last.
pub fn hom_instances() -> Vec<(&'static str, DiGraph, DiGraph)> {
    vec![
        ("c25_to_c5", cycle(25), cycle(5)),
        ("c9_to_k3", cycle(9), clique(3)),
        ("petersen_to_k3", loopcond::graph::petersen(), clique(3)),
        ("k4_to_k3", clique(4), clique(3)),
    ]
}

pub fn condition(g: &DiGraph) -> LoopCondition {
    LoopCondition::from_graph("t", g).expect("graph without isolated vertices")
}

/// Decision instances `(name, algebra, condition)`.
pub fn decision_instances() -> Vec<(&'static str, FiniteAlgebra, LoopCondition)> {
    let siggers = loopcond::parse_condition("s(x,y,y,z,z,x)=s(y,x,z,y,x,z)").expect("valid");
    vec![
        ("z2_siggers", FiniteAlgebra::affine_maltsev(2), siggers.clone()),
        ("z3_siggers", FiniteAlgebra::affine_maltsev(3), siggers),
        ("z2_c5", FiniteAlgebra::affine_maltsev(2), condition(&cycle(5))),
        ("z3_k4", FiniteAlgebra::affine_maltsev(3), condition(&clique(4))),
        ("projection_k4", FiniteAlgebra::projection(2), condition(&clique(4))),
    ]
}
