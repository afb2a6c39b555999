//! The three classes of loop conditions with symmetric graphs, one-sided
//! implication through graph homomorphisms, and the Z_2 / Z_3 audit.

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    affine_satisfies, satisfies_condition, verify_witness, AlgebraError, Decision, DecisionLimits,
    FiniteAlgebra, Term,
};
use crate::graph::{find_hom, DiGraph, GraphError, Homomorphism, SearchConfig};
use crate::identity::{condition_graph, parse_condition, LoopCondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum ConditionClass {
    Trivial,
    Bipartite,
    NonbipartiteLoopless,
    OrientedUnresolved {
        smooth: bool,
        /// `None` when the graph is not weakly connected.
        algebraic_length: Option<u64>,
        weakly_connected: bool,
    },
}

impl ConditionClass {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionClass::Trivial => "Trivial",
            ConditionClass::Bipartite => "Bipartite",
            ConditionClass::NonbipartiteLoopless => "NonbipartiteLoopless",
            ConditionClass::OrientedUnresolved { .. } => "OrientedUnresolved",
        }
    }
}

pub fn classify(c: &LoopCondition) -> ConditionClass {
    classify_graph(&condition_graph(c))
}

pub fn classify_graph(g: &DiGraph) -> ConditionClass {
    if g.has_loop() {
        return ConditionClass::Trivial;
    }
    if g.is_symmetric() {
        return if g.is_bipartite().expect("symmetric") {
            ConditionClass::Bipartite
        } else {
            ConditionClass::NonbipartiteLoopless
        };
    }
    let weakly_connected = g.is_weakly_connected();
    ConditionClass::OrientedUnresolved {
        smooth: g.is_smooth(),
        algebraic_length: g.algebraic_length().ok(),
        weakly_connected,
    }
}

/// A homomorphism `G_c -> G_d`, which proves that `c` implies `d`. `None`
/// only means this method does not establish the implication.
pub fn implies_by_hom(
    c: &LoopCondition,
    d: &LoopCondition,
    cfg: &SearchConfig,
) -> Result<Option<Homomorphism>, GraphError> {
    find_hom(&condition_graph(c), &condition_graph(d), cfg)
}

pub fn equivalence_note(class: &ConditionClass) -> String {
    match class {
        ConditionClass::Trivial => {
            "The graph has a loop, so the condition is trivial: it is satisfied by a projection.".into()
        }
        ConditionClass::Bipartite => "Bipartite and loopless: equivalent to every other such condition, \
             in particular to commutativity t(x,y)=t(y,x)."
            .into(),
        ConditionClass::NonbipartiteLoopless => "Non-bipartite and loopless: equivalent to every other such \
             condition, for example the Siggers condition. These are the weakest non-trivial loop conditions."
            .into(),
        ConditionClass::OrientedUnresolved {
            smooth: true,
            algebraic_length: Some(1),
            weakly_connected: true,
        } => "Oriented graph that is weakly connected, smooth and of algebraic length 1. For finite algebras \
              such a condition is equivalent to the non-trivial conditions of the weakest class, by the theorem \
              on weakly connected smooth graphs with algebraic length one. Over arbitrary algebras its place is \
              unresolved."
            .into(),
        ConditionClass::OrientedUnresolved { .. } => {
            "Oriented graph outside the known cases; its equivalence class is unresolved.".into()
        }
    }
}

fn details(g: &DiGraph, class: &ConditionClass) -> Value {
    let mut d = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "symmetric": g.is_symmetric(),
        "loop": g.has_loop(),
    });
    match class {
        ConditionClass::Bipartite | ConditionClass::NonbipartiteLoopless => {
            d["bipartite"] = json!(matches!(class, ConditionClass::Bipartite));
            d["odd_girth"] = json!(g.odd_girth().expect("symmetric"));
        }
        ConditionClass::OrientedUnresolved {
            smooth,
            algebraic_length,
            weakly_connected,
        } => {
            d["smooth"] = json!(smooth);
            d["algebraic_length"] = json!(algebraic_length);
            d["weakly_connected"] = json!(weakly_connected);
        }
        ConditionClass::Trivial => {}
    }
    d
}

/// The serialised form `{"class", "details", "note"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: &'static str,
    pub details: Value,
    pub note: String,
}

pub fn classification(c: &LoopCondition) -> Classification {
    let g = condition_graph(c);
    let class = classify_graph(&g);
    Classification {
        class: class.name(),
        details: details(&g, &class),
        note: equivalence_note(&class),
    }
}

pub const COMMUTATIVITY: &str = "t(x,y)=t(y,x)";
pub const SIGGERS: &str = "s(x,y,y,z,z,x)=s(y,x,z,y,x,z)";

/// What the affine algebras on Z_2 and Z_3 do with commutativity and the
/// triangle condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineSeparation {
    pub modulus: usize,
    pub commutative: bool,
    pub triangle: bool,
    /// Coefficients of a commutative term `Σ c_i x_i`, if any.
    pub commutative_coefficients: Option<Vec<u64>>,
    pub commutative_term: Option<String>,
    pub separates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationAudit {
    pub claimed_example: AffineSeparation,
    pub alternative: AffineSeparation,
    /// Set when `({0,1,2}, x+y-z)` turns out to satisfy commutativity after
    /// all, so it does not separate the two classes.
    pub discrepancy: bool,
    pub note: String,
}

fn decide(alg: &FiniteAlgebra, c: &LoopCondition) -> Result<bool, AlgebraError> {
    match satisfies_condition(alg, c, &DecisionLimits::default())? {
        Decision::Satisfied { .. } => Ok(true),
        Decision::NotSatisfied => Ok(false),
        Decision::ResourceExceeded { elements_generated } => Err(AlgebraError::InvalidAlgebra(format!(
            "closure gave up after {elements_generated} elements"
        ))),
    }
}

fn affine_separation(modulus: usize) -> Result<AffineSeparation, AlgebraError> {
    let alg = FiniteAlgebra::affine_maltsev(modulus);
    let comm = parse_condition(COMMUTATIVITY).expect("valid");
    let tri = parse_condition(SIGGERS).expect("valid");
    let coefficients = affine_satisfies(modulus as u64, &comm);
    let commutative = decide(&alg, &comm)?;
    let triangle = decide(&alg, &tri)?;
    assert_eq!(commutative, coefficients.is_some(), "closure and affine oracle disagree");
    assert_eq!(triangle, affine_satisfies(modulus as u64, &tri).is_some(), "closure and affine oracle disagree");
    // m(x0, x0, x1) = 2 x0 - x1, commutative exactly when 3 | m
    let short = Term::op("m", vec![Term::Var(0), Term::Var(0), Term::Var(1)]);
    let commutative_term = verify_witness(&alg, &comm, &short)?.then(|| short.to_string());
    Ok(AffineSeparation {
        modulus,
        commutative,
        triangle,
        commutative_coefficients: coefficients,
        commutative_term,
        separates: triangle && !commutative,
    })
}

/// Checks whether `({0,1,2}, x+y-z)` separates the triangle condition from
/// commutativity, and compares with `({0,1}, x+y-z)`.
pub fn separation_audit() -> Result<SeparationAudit, AlgebraError> {
    let z3 = affine_separation(3)?;
    let z2 = affine_separation(2)?;
    let discrepancy = !z3.separates;
    let note = if discrepancy {
        format!(
            "({{0,1,2}}, x+y-z) is commutative via {}, so it does not satisfy the triangle condition \
             without commutativity. ({{0,1}}, x+y-z) separates them: triangle {}, commutativity {}.",
            z3.commutative_term.as_deref().unwrap_or("an affine term"),
            z2.triangle,
            z2.commutative
        )
    } else {
        "({0,1,2}, x+y-z) satisfies the triangle condition but not commutativity.".into()
    };
    Ok(SeparationAudit {
        claimed_example: z3,
        alternative: z2,
        discrepancy,
        note,
    })
}
