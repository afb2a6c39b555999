//! Worklist closure of coordinate vectors under the basic operations of an
//! algebra applied coordinatewise, with provenance for term extraction.

use std::collections::HashMap;

use indexmap::IndexSet;
use serde::Serialize;

use super::{verify_witness, AlgebraError, FiniteAlgebra, Term};
use crate::identity::{condition_graph, LoopCondition};
use crate::ppdef::Relation;

pub const DEFAULT_MAX_ENTRIES: usize = 4096;
pub const DEFAULT_MAX_ELEMENTS: usize = 1_000_000;

/// How a closure element was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Generator(usize),
    Apply { op: usize, args: Vec<usize> },
}

enum Outcome {
    Closed,
    Found(usize),
    CapExceeded,
}

struct Closure<'a> {
    alg: &'a FiniteAlgebra,
    elements: IndexSet<Box<[u32]>>,
    provenance: Vec<Provenance>,
}

impl<'a> Closure<'a> {
    fn new(alg: &'a FiniteAlgebra) -> Self {
        Closure {
            alg,
            elements: IndexSet::new(),
            provenance: Vec::new(),
        }
    }

    /// Inserts `v`; returns its index when it is new.
    fn insert(&mut self, v: Box<[u32]>, how: Provenance) -> Option<usize> {
        let (index, fresh) = self.elements.insert_full(v);
        if fresh {
            self.provenance.push(how);
        }
        fresh.then_some(index)
    }

    /// Closes under all operations. Element `i` is expanded by applying every
    /// operation to the argument tuples over `0..=i` that contain `i`, so each
    /// tuple is visited once. Stops as soon as `target` accepts an element.
    fn run(
        &mut self,
        width: usize,
        generators: Vec<Box<[u32]>>,
        cap: usize,
        target: impl Fn(&[u32]) -> bool,
    ) -> Outcome {
        let alg = self.alg;
        let size = alg.size();
        let check = |closure: &mut Self, v: Box<[u32]>, how: Provenance| -> Option<Outcome> {
            let hit = target(&v);
            let index = closure.insert(v, how)?;
            if hit {
                return Some(Outcome::Found(index));
            }
            (closure.elements.len() > cap).then_some(Outcome::CapExceeded)
        };
        for (j, g) in generators.into_iter().enumerate() {
            if let Some(out) = check(self, g, Provenance::Generator(j)) {
                return out;
            }
        }
        for (o, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                let constant = vec![op.table[0] as u32; width].into_boxed_slice();
                let how = Provenance::Apply { op: o, args: vec![] };
                if let Some(out) = check(self, constant, how) {
                    return out;
                }
            }
        }
        let mut i = 0;
        let mut image = vec![0u32; width];
        let mut values = Vec::new();
        while i < self.elements.len() {
            for (o, op) in alg.operations().iter().enumerate() {
                let m = op.arity;
                for first in 0..m {
                    // positions before `first` take indices < i, later ones <= i
                    let free: Vec<(usize, usize)> = (0..m)
                        .filter(|&p| p != first)
                        .map(|p| (p, if p < first { i } else { i + 1 }))
                        .collect();
                    let total: usize = free.iter().map(|&(_, bound)| bound).product();
                    let mut args = vec![i; m];
                    for mut code in 0..total {
                        for &(p, bound) in free.iter().rev() {
                            args[p] = code % bound;
                            code /= bound;
                        }
                        for (c, out) in image.iter_mut().enumerate() {
                            values.clear();
                            values.extend(args.iter().map(|&a| self.elements[a][c] as usize));
                            *out = op.apply(size, &values) as u32;
                        }
                        if !self.elements.contains(image.as_slice()) {
                            let how = Provenance::Apply { op: o, args: args.clone() };
                            if let Some(out) = check(self, image.clone().into_boxed_slice(), how) {
                                return out;
                            }
                        }
                    }
                }
            }
            i += 1;
        }
        Outcome::Closed
    }

    fn term(&self, index: usize, leaf: &impl Fn(usize) -> Term) -> Term {
        build_term(self.alg, &self.provenance, index, leaf)
    }
}

/// Rebuilds the term producing element `index`, reading generator `j` as
/// `leaf(j)`.
fn build_term(alg: &FiniteAlgebra, provenance: &[Provenance], index: usize, leaf: &impl Fn(usize) -> Term) -> Term {
    fn go(
        alg: &FiniteAlgebra,
        provenance: &[Provenance],
        index: usize,
        leaf: &impl Fn(usize) -> Term,
        memo: &mut HashMap<usize, Term>,
    ) -> Term {
        if let Some(t) = memo.get(&index) {
            return t.clone();
        }
        let t = match &provenance[index] {
            Provenance::Generator(j) => leaf(*j),
            Provenance::Apply { op, args } => Term::Op {
                name: alg.operations()[*op].name.clone(),
                args: args.iter().map(|&a| go(alg, provenance, a, leaf, memo)).collect(),
            },
        };
        memo.insert(index, t.clone());
        t
    }
    go(alg, provenance, index, leaf, &mut HashMap::new())
}

/// The closure of a set of tuples under an algebra's operations.
#[derive(Debug, Clone, PartialEq)]
pub struct Subpower {
    pub relation: Relation,
    /// Elements in generation order; `provenance[i]` explains `elements[i]`.
    pub elements: Vec<Vec<usize>>,
    pub provenance: Vec<Provenance>,
    /// The element cap was hit; `relation` is then only a partial closure.
    pub cap_exceeded: bool,
}

impl Subpower {
    /// A term whose leaves `x<j>` stand for generator `j` and which produces
    /// `tuple` when applied coordinatewise.
    pub fn term_for(&self, tuple: &[usize], alg: &FiniteAlgebra) -> Option<Term> {
        let index = self.elements.iter().position(|e| e == tuple)?;
        Some(build_term(alg, &self.provenance, index, &Term::Var))
    }
}

/// Least subuniverse of `alg^k` containing `generators`.
pub fn generate_subpower(
    alg: &FiniteAlgebra,
    k: usize,
    generators: &[Vec<usize>],
    cap: usize,
) -> Result<Subpower, AlgebraError> {
    if let Some(bad) = generators.iter().find(|g| g.len() != k || g.iter().any(|&x| x >= alg.size())) {
        return Err(AlgebraError::InvalidGenerator(bad.clone()));
    }
    let mut closure = Closure::new(alg);
    let gens = generators
        .iter()
        .map(|g| g.iter().map(|&x| x as u32).collect())
        .collect();
    let outcome = closure.run(k, gens, cap, |_| false);
    let elements: Vec<Vec<usize>> = closure
        .elements
        .iter()
        .map(|e| e.iter().map(|&x| x as usize).collect())
        .collect();
    let relation = Relation::new(alg.size(), k, elements.clone()).expect("closure stays in range");
    Ok(Subpower {
        relation,
        elements,
        provenance: closure.provenance,
        cap_exceeded: matches!(outcome, Outcome::CapExceeded),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionLimits {
    /// Cap on `size^variables`, the length of one free-algebra table.
    pub max_entries: usize,
    /// Cap on the number of generated pair-tables.
    pub max_elements: usize,
}

impl Default for DecisionLimits {
    fn default() -> Self {
        DecisionLimits {
            max_entries: DEFAULT_MAX_ENTRIES,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    Satisfied { witness: Term },
    NotSatisfied,
    ResourceExceeded { elements_generated: usize },
}

/// Decides whether the variety generated by `alg` satisfies `c`.
///
/// Elements of the free algebra on the condition's variables are term
/// operations `A^n -> A`, stored as tables. Each edge `(u, v)` of the
/// condition graph becomes the pair of projections `(x_u, x_v)`; the pairs
/// are closed under the operations and the condition holds iff some pair has
/// equal coordinates. The term producing that pair is the witness.
pub fn satisfies_condition(
    alg: &FiniteAlgebra,
    c: &LoopCondition,
    limits: &DecisionLimits,
) -> Result<Decision, AlgebraError> {
    let n = c.variables().len();
    let size = alg.size();
    let entries = size
        .checked_pow(n as u32)
        .filter(|&e| e <= limits.max_entries)
        .ok_or(AlgebraError::ExponentCap {
            size,
            vars: n,
            cap: limits.max_entries,
        })?;
    let graph = condition_graph(c);
    let projection = |var: usize| {
        let stride = size.pow((n - 1 - var) as u32);
        (0..entries).map(move |row| ((row / stride) % size) as u32)
    };
    let generators: Vec<Box<[u32]>> = graph
        .edges()
        .iter()
        .map(|&(u, v)| projection(u).chain(projection(v)).collect())
        .collect();
    let mut closure = Closure::new(alg);
    let outcome = closure.run(2 * entries, generators, limits.max_elements, |pair| {
        pair[..entries] == pair[entries..]
    });
    Ok(match outcome {
        Outcome::Closed => Decision::NotSatisfied,
        Outcome::CapExceeded => Decision::ResourceExceeded {
            elements_generated: closure.elements.len(),
        },
        Outcome::Found(index) => {
            let (lhs, rhs) = (c.lhs_indices(), c.rhs_indices());
            let position = |j: usize| {
                let edge = graph.edges()[j];
                (0..c.arity())
                    .find(|&i| (lhs[i], rhs[i]) == edge)
                    .expect("every edge comes from a position")
            };
            let witness = closure.term(index, &|j| Term::Var(position(j)));
            assert!(
                verify_witness(alg, c, &witness)?,
                "extracted term {witness} does not satisfy {c}"
            );
            Decision::Satisfied { witness }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{affine_satisfies, is_compatible, Operation};
    use crate::identity::parse_condition;
    use proptest::prelude::*;

    fn decide(alg: &FiniteAlgebra, s: &str) -> Decision {
        satisfies_condition(alg, &parse_condition(s).unwrap(), &DecisionLimits::default()).unwrap()
    }

    /// Naive fixpoint: apply every operation to every argument tuple until
    /// nothing changes.
    fn brute_closure(alg: &FiniteAlgebra, k: usize, gens: &[Vec<usize>]) -> Relation {
        let mut set: std::collections::BTreeSet<Vec<usize>> = gens.iter().cloned().collect();
        loop {
            let current: Vec<Vec<usize>> = set.iter().cloned().collect();
            let before = set.len();
            for op in alg.operations() {
                let m = op.arity;
                for mut code in 0..current.len().pow(m as u32) {
                    let mut picks = vec![0; m];
                    for slot in picks.iter_mut().rev() {
                        *slot = code % current.len().max(1);
                        code /= current.len().max(1);
                    }
                    if m > 0 && current.is_empty() {
                        continue;
                    }
                    let t: Vec<usize> = (0..k)
                        .map(|c| op.apply(alg.size(), &picks.iter().map(|&p| current[p][c]).collect::<Vec<_>>()))
                        .collect();
                    set.insert(t);
                }
            }
            if set.len() == before {
                return Relation::new(alg.size(), k, set).unwrap();
            }
        }
    }

    #[test]
    fn subpower_examples() {
        let z2 = FiniteAlgebra::affine_maltsev(2);
        let empty = generate_subpower(&z2, 2, &[], 100).unwrap();
        assert!(empty.relation.is_empty());
        let single = generate_subpower(&z2, 1, &[vec![0]], 100).unwrap();
        assert_eq!(single.relation, Relation::new(2, 1, vec![vec![0]]).unwrap());
        let pair = generate_subpower(&z2, 2, &[vec![0, 1], vec![1, 0]], 100).unwrap();
        assert_eq!(pair.relation, Relation::new(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap());
        assert!(!pair.cap_exceeded);
        assert!(matches!(
            generate_subpower(&z2, 2, &[vec![0, 2]], 100),
            Err(AlgebraError::InvalidGenerator(_))
        ));
    }

    #[test]
    fn subpower_with_constants_and_unary() {
        let alg = FiniteAlgebra::new(
            4,
            vec![
                Operation { name: "zero".into(), arity: 0, table: vec![0] },
                Operation::from_fn("s", 1, 4, |a| (a[0] + 1) % 4),
            ],
        )
        .unwrap();
        let sub = generate_subpower(&alg, 2, &[], 100).unwrap();
        assert_eq!(sub.relation, brute_closure(&alg, 2, &[]));
        assert_eq!(sub.relation.len(), 4);
        let sub = generate_subpower(&alg, 2, &[vec![0, 1]], 100).unwrap();
        assert_eq!(sub.relation, brute_closure(&alg, 2, &[vec![0, 1]]));
    }

    #[test]
    fn subpower_cap_reported() {
        let z3 = FiniteAlgebra::affine_maltsev(3);
        let sub = generate_subpower(&z3, 2, &[vec![0, 1], vec![1, 0], vec![0, 0]], 3).unwrap();
        assert!(sub.cap_exceeded);
    }

    #[test]
    fn provenance_terms_reproduce_elements() {
        let z3 = FiniteAlgebra::affine_maltsev(3);
        let gens = vec![vec![0, 1, 2], vec![1, 1, 0], vec![2, 0, 0]];
        let sub = generate_subpower(&z3, 3, &gens, 1000).unwrap();
        for e in &sub.elements {
            let t = sub.term_for(e, &z3).unwrap();
            let produced: Vec<usize> = (0..3)
                .map(|c| t.eval(&z3, &gens.iter().map(|g| g[c]).collect::<Vec<_>>()))
                .collect();
            assert_eq!(&produced, e);
        }
    }

    #[test]
    fn projection_algebra() {
        let p = FiniteAlgebra::projection(2);
        assert_eq!(decide(&p, "s(x,y,y,z,z,x)=s(y,x,z,y,x,z)"), Decision::NotSatisfied);
        assert_eq!(decide(&p, "t(x,y)=t(y,x)"), Decision::NotSatisfied);
        let Decision::Satisfied { witness } = decide(&p, "t(x,y,z)=t(x,z,y)") else {
            panic!("looped condition must hold");
        };
        assert_eq!(witness, Term::Var(0));
    }

    #[test]
    fn z2_siggers_and_commutativity() {
        let z2 = FiniteAlgebra::affine_maltsev(2);
        let siggers = parse_condition("s(x,y,y,z,z,x)=s(y,x,z,y,x,z)").unwrap();
        let Decision::Satisfied { witness } = decide(&z2, "s(x,y,y,z,z,x)=s(y,x,z,y,x,z)") else {
            panic!("Z2 has a Siggers term");
        };
        assert!(verify_witness(&z2, &siggers, &witness).unwrap());
        // the witness is an affine map x_i-sum with coefficients solving the
        // balance equations
        let c = affine_coefficients(&z2, &witness, 6);
        assert_eq!(c.iter().sum::<usize>() % 2, 1);
        // x: positions 0,5 vs 1,4; y: 1,2 vs 0,3; z: 3,4 vs 2,5
        assert_eq!((c[0] + c[5]) % 2, (c[1] + c[4]) % 2);
        assert_eq!((c[1] + c[2]) % 2, (c[0] + c[3]) % 2);
        assert_eq!((c[3] + c[4]) % 2, (c[2] + c[5]) % 2);
        assert_eq!(decide(&z2, "t(x,y)=t(y,x)"), Decision::NotSatisfied);
    }

    /// Reads off `t = Σ c_i x_i` over Z_2 by evaluating at unit vectors.
    fn affine_coefficients(alg: &FiniteAlgebra, t: &Term, arity: usize) -> Vec<usize> {
        let zero = vec![0; arity];
        assert_eq!(t.eval(alg, &zero), 0);
        (0..arity)
            .map(|i| {
                let mut e = zero.clone();
                e[i] = 1;
                t.eval(alg, &e)
            })
            .collect()
    }

    #[test]
    fn caps() {
        let z3 = FiniteAlgebra::affine_maltsev(3);
        let c = parse_condition("t(a,b,c,d,e,f,g,h)=t(b,c,d,e,f,g,h,a)").unwrap();
        assert_eq!(
            satisfies_condition(&z3, &c, &DecisionLimits::default()),
            Err(AlgebraError::ExponentCap { size: 3, vars: 8, cap: 4096 })
        );
        let tiny = DecisionLimits { max_entries: 4096, max_elements: 2 };
        let c = parse_condition("t(x,y,z)=t(y,z,x)").unwrap();
        assert!(matches!(
            satisfies_condition(&z3, &c, &tiny).unwrap(),
            Decision::ResourceExceeded { .. }
        ));
    }

    #[test]
    fn decision_json() {
        let d = Decision::Satisfied { witness: Term::Var(0) };
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"decision":"satisfied","witness":"x0"}"#);
        assert_eq!(serde_json::to_string(&Decision::NotSatisfied).unwrap(), r#"{"decision":"not_satisfied"}"#);
        assert_eq!(
            serde_json::to_string(&Decision::ResourceExceeded { elements_generated: 7 }).unwrap(),
            r#"{"decision":"resource_exceeded","elements_generated":7}"#
        );
    }

    fn small_algebra() -> impl Strategy<Value = FiniteAlgebra> {
        (2usize..=3, 1usize..=2).prop_flat_map(|(size, arity)| {
            prop::collection::vec(0..size, size.pow(arity as u32)).prop_map(move |table| {
                FiniteAlgebra::new(size, vec![Operation { name: "f".into(), arity, table }]).unwrap()
            })
        })
    }

    fn small_condition() -> impl Strategy<Value = LoopCondition> {
        let names = prop::sample::select(vec!["x", "y", "z"]);
        (1usize..=4).prop_flat_map(move |n| {
            (prop::collection::vec(names.clone(), n), prop::collection::vec(names.clone(), n)).prop_map(|(l, r)| {
                LoopCondition::new("t", l.into_iter().map(String::from).collect(), r.into_iter().map(String::from).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn closure_matches_fixpoint(alg in small_algebra(), gens in prop::collection::vec(prop::collection::vec(0usize..2, 2), 0..4)) {
            let sub = generate_subpower(&alg, 2, &gens, 10_000).unwrap();
            prop_assert!(is_compatible(&alg, &sub.relation).unwrap());
            for g in &gens {
                prop_assert!(sub.relation.contains(g));
            }
            prop_assert_eq!(&sub.relation, &brute_closure(&alg, 2, &gens));
        }

        #[test]
        fn decisions_are_sound(alg in small_algebra(), c in small_condition()) {
            if let Decision::Satisfied { witness } = satisfies_condition(&alg, &c, &DecisionLimits::default()).unwrap() {
                prop_assert!(verify_witness(&alg, &c, &witness).unwrap());
            }
        }

        #[test]
        fn agrees_with_affine_oracle(m in 2usize..=3, c in small_condition()) {
            let alg = FiniteAlgebra::affine_maltsev(m);
            let decision = satisfies_condition(&alg, &c, &DecisionLimits::default()).unwrap();
            let oracle = affine_satisfies(m as u64, &c);
            prop_assert_eq!(matches!(decision, Decision::Satisfied { .. }), oracle.is_some());
        }
    }
}
