use std::fmt;

use serde::{Serialize, Serializer};

use super::{AlgebraError, FiniteAlgebra};
use crate::identity::LoopCondition;

/// A term over the basic operations of an algebra. `Var(i)` is the `i`-th
/// argument of the term operation, printed `x<i>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op { name: String, args: Vec<Term> },
}

impl Term {
    pub fn op(name: &str, args: Vec<Term>) -> Term {
        Term::Op {
            name: name.to_owned(),
            args,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Checks operation names, child counts, and that every leaf is below
    /// `arity`.
    pub fn check(&self, a: &FiniteAlgebra, arity: usize) -> Result<(), AlgebraError> {
        match self {
            Term::Var(i) if *i < arity => Ok(()),
            Term::Var(i) => Err(AlgebraError::BadTerm(format!("variable x{i} exceeds arity {arity}"))),
            Term::Op { name, args } => {
                let op = a
                    .operation(name)
                    .ok_or_else(|| AlgebraError::BadTerm(format!("unknown operation `{name}`")))?;
                if op.arity != args.len() {
                    return Err(AlgebraError::BadTerm(format!(
                        "`{name}` takes {} arguments, got {}",
                        op.arity,
                        args.len()
                    )));
                }
                args.iter().try_for_each(|t| t.check(a, arity))
            }
        }
    }

    /// Value of the term at `point`. The term must pass [`Term::check`].
    pub fn eval(&self, a: &FiniteAlgebra, point: &[usize]) -> usize {
        match self {
            Term::Var(i) => point[*i],
            Term::Op { name, args } => {
                let op = a.operation(name).expect("checked term");
                let values: Vec<usize> = args.iter().map(|t| t.eval(a, point)).collect();
                op.apply(a.size(), &values)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Op { name, args } => {
                write!(f, "{name}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An assignment of the condition's variables under which
/// `t(lhs) != t(rhs)`, or `None` when `t` satisfies the identity in `a`.
pub fn find_counterexample(
    a: &FiniteAlgebra,
    c: &LoopCondition,
    t: &Term,
) -> Result<Option<Vec<usize>>, AlgebraError> {
    t.check(a, c.arity())?;
    let (lhs, rhs) = (c.lhs_indices(), c.rhs_indices());
    let n = c.variables().len();
    let rows = a
        .size()
        .checked_pow(n as u32)
        .ok_or_else(|| AlgebraError::BadTerm("too many variables to tabulate".into()))?;
    let mut values = vec![0; n];
    let mut left = vec![0; c.arity()];
    let mut right = vec![0; c.arity()];
    for mut code in 0..rows {
        for slot in values.iter_mut().rev() {
            *slot = code % a.size();
            code /= a.size();
        }
        for i in 0..c.arity() {
            left[i] = values[lhs[i]];
            right[i] = values[rhs[i]];
        }
        if t.eval(a, &left) != t.eval(a, &right) {
            return Ok(Some(values));
        }
    }
    Ok(None)
}

/// Whether `t(u_1..u_n) = t(v_1..v_n)` holds identically in `a`.
pub fn verify_witness(a: &FiniteAlgebra, c: &LoopCondition, t: &Term) -> Result<bool, AlgebraError> {
    Ok(find_counterexample(a, c, t)?.is_none())
}
