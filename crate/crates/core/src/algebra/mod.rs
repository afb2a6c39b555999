//! Finite algebras given by operation tables, their compatible relations,
//! and the decision procedure for loop conditions in the variety an algebra
//! generates.

mod affine;
mod closure;
mod term;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ppdef::Relation;

pub use affine::{affine_satisfies, affine_term};
pub use closure::{
    generate_subpower, satisfies_condition, Decision, DecisionLimits, Provenance, Subpower,
    DEFAULT_MAX_ELEMENTS, DEFAULT_MAX_ENTRIES,
};
pub use term::{find_counterexample, verify_witness, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("relation lives on {relation} elements, the algebra on {algebra}")]
    UniverseMismatch { algebra: usize, relation: usize },
    #[error("free algebra tables would need {size}^{vars} entries, above the cap of {cap}")]
    ExponentCap { size: usize, vars: usize, cap: usize },
    #[error("bad term: {0}")]
    BadTerm(String),
    #[error("invalid generator {0:?}")]
    InvalidGenerator(Vec<usize>),
}

/// A basic operation given by its full table. Entry
/// `table[Σ x_i · size^(m-i)]` is the value at `(x_1, ..., x_m)`; the last
/// argument varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    /// Tabulates `f` over all argument tuples.
    pub fn from_fn(name: &str, arity: usize, size: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let mut args = vec![0; arity];
        let table = (0..size.pow(arity as u32))
            .map(|mut code| {
                for slot in args.iter_mut().rev() {
                    *slot = code % size;
                    code /= size;
                }
                f(&args)
            })
            .collect();
        Operation {
            name: name.to_owned(),
            arity,
            table,
        }
    }

    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[args.iter().fold(0, |acc, &x| acc * size + x)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson")]
pub struct FiniteAlgebra {
    size: usize,
    operations: Vec<Operation>,
}

#[derive(Deserialize)]
struct AlgebraJson {
    size: usize,
    operations: Vec<Operation>,
}

impl TryFrom<AlgebraJson> for FiniteAlgebra {
    type Error = AlgebraError;

    fn try_from(j: AlgebraJson) -> Result<Self, AlgebraError> {
        FiniteAlgebra::new(j.size, j.operations)
    }
}

impl FiniteAlgebra {
    pub fn new(size: usize, operations: Vec<Operation>) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::InvalidAlgebra("universe must be nonempty".into()));
        }
        for (i, op) in operations.iter().enumerate() {
            let expected = (op.arity < 32)
                .then(|| size.checked_pow(op.arity as u32))
                .flatten();
            if expected != Some(op.table.len()) {
                return Err(AlgebraError::InvalidAlgebra(format!(
                    "operation `{}` has {} table entries, expected {size}^{}",
                    op.name,
                    op.table.len(),
                    op.arity
                )));
            }
            if let Some(bad) = op.table.iter().find(|&&v| v >= size) {
                return Err(AlgebraError::InvalidAlgebra(format!(
                    "operation `{}` takes value {bad} outside 0..{size}",
                    op.name
                )));
            }
            if operations[..i].iter().any(|o| o.name == op.name) {
                return Err(AlgebraError::InvalidAlgebra(format!("duplicate operation `{}`", op.name)));
            }
        }
        Ok(FiniteAlgebra { size, operations })
    }

    /// `({0..m-1}, m(x,y,z) = x + y - z mod m)`.
    pub fn affine_maltsev(modulus: usize) -> Self {
        let m = modulus;
        let op = Operation::from_fn("m", 3, m, |a| (a[0] + a[1] + m - a[2]) % m);
        FiniteAlgebra::new(m, vec![op]).expect("valid table")
    }

    /// A single binary operation `p(x, y) = x`.
    pub fn projection(size: usize) -> Self {
        let op = Operation::from_fn("p", 2, size, |a| a[0]);
        FiniteAlgebra::new(size, vec![op]).expect("valid table")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|o| o.name == name)
    }
}

/// Whether `r` is a subuniverse of the corresponding power of `a`: closed
/// under every operation applied coordinatewise.
pub fn is_compatible(a: &FiniteAlgebra, r: &Relation) -> Result<bool, AlgebraError> {
    if r.universe_size() != a.size {
        return Err(AlgebraError::UniverseMismatch {
            algebra: a.size,
            relation: r.universe_size(),
        });
    }
    let tuples: Vec<&[usize]> = r.tuples().collect();
    let k = r.arity();
    for op in &a.operations {
        let m = op.arity;
        let count = tuples.len().checked_pow(m as u32).expect("relation too large to check");
        let mut picks = vec![0; m];
        let mut args = vec![0; m];
        let mut image = vec![0; k];
        for mut code in 0..count {
            for slot in picks.iter_mut().rev() {
                *slot = code % tuples.len();
                code /= tuples.len();
            }
            for (c, out) in image.iter_mut().enumerate() {
                for (arg, &p) in args.iter_mut().zip(&picks) {
                    *arg = tuples[p][c];
                }
                *out = op.apply(a.size, &args);
            }
            if !r.contains(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_sum() -> FiniteAlgebra {
        FiniteAlgebra::new(2, vec![Operation::from_fn("f", 3, 2, |a| (a[0] + a[1] + a[2]) % 2)]).unwrap()
    }

    #[test]
    fn table_layout_is_last_argument_fastest() {
        let op = Operation::from_fn("d", 2, 3, |a| (a[0] * 3 + a[1]) % 3);
        // index of (x1, x2) is x1*3 + x2
        assert_eq!(op.table, vec![0, 1, 2, 0, 1, 2, 0, 1, 2]);
        let minus = Operation::from_fn("s", 2, 3, |a| (a[0] + 3 - a[1]) % 3);
        assert_eq!(minus.apply(3, &[0, 1]), minus.table[1]);
        assert_eq!(minus.table[1], 2);
        assert_eq!(FiniteAlgebra::affine_maltsev(2), {
            let mut alg = z2_sum();
            alg.operations[0].name = "m".into();
            alg
        });
    }

    #[test]
    fn validation() {
        let short = Operation { name: "f".into(), arity: 2, table: vec![0, 1, 1] };
        assert!(FiniteAlgebra::new(2, vec![short]).is_err());
        let wide = Operation { name: "f".into(), arity: 1, table: vec![0, 2] };
        assert!(FiniteAlgebra::new(2, vec![wide]).is_err());
        assert!(FiniteAlgebra::new(0, vec![]).is_err());
        let c = Operation { name: "c".into(), arity: 0, table: vec![1] };
        assert!(FiniteAlgebra::new(2, vec![c.clone(), c]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"size":2,"operations":[{"name":"m","arity":3,"table":[0,1,1,0,1,0,0,1]}]}"#;
        let alg: FiniteAlgebra = serde_json::from_str(text).unwrap();
        assert_eq!(alg, FiniteAlgebra::affine_maltsev(2));
        assert_eq!(serde_json::to_string(&alg).unwrap(), text);
        assert!(serde_json::from_str::<FiniteAlgebra>(r#"{"size":2,"operations":[{"name":"m","arity":1,"table":[0]}]}"#).is_err());
    }

    #[test]
    fn compatibility() {
        let a = z2_sum();
        assert!(is_compatible(&a, &Relation::full(2, 2)).unwrap());
        let diag = Relation::new(2, 2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert!(is_compatible(&a, &diag).unwrap());
        let single = Relation::new(2, 2, vec![vec![0, 1]]).unwrap();
        assert!(is_compatible(&a, &single).unwrap());
        let le = Relation::new(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        // f((0,0),(0,1),(1,1)) = (1, 0)
        assert!(!is_compatible(&a, &le).unwrap());
        assert_eq!(
            is_compatible(&a, &Relation::full(3, 1)),
            Err(AlgebraError::UniverseMismatch { algebra: 2, relation: 3 })
        );
    }

    #[test]
    fn constants_must_be_in_compatible_relations() {
        let a = FiniteAlgebra::new(2, vec![Operation { name: "one".into(), arity: 0, table: vec![1] }]).unwrap();
        assert!(!is_compatible(&a, &Relation::new(2, 1, vec![vec![0]]).unwrap()).unwrap());
        assert!(is_compatible(&a, &Relation::new(2, 1, vec![vec![1]]).unwrap()).unwrap());
    }
}
