//! Exact decision for the algebras `(Z_m, x + y - z)`.
//!
//! Their term operations are exactly the affine combinations `Σ c_i x_i`
//! with `Σ c_i ≡ 1 (mod m)`, so a loop condition holds iff a linear system
//! over `Z_m` is solvable: for every variable `w`, the coefficients at the
//! positions where `w` occurs on the left must sum to those where it occurs
//! on the right.

use super::Term;
use crate::identity::LoopCondition;

/// A coefficient vector `c` with `Σ c_i ≡ 1` and, for each variable `w`,
/// `Σ_{u_i = w} c_i ≡ Σ_{v_i = w} c_i (mod m)`; `None` if there is none.
pub fn affine_satisfies(modulus: u64, c: &LoopCondition) -> Option<Vec<u64>> {
    assert!(modulus >= 2, "modulus must be at least 2");
    let (lhs, rhs) = (c.lhs_indices(), c.rhs_indices());
    let cols = c.arity();
    let mut rows: Vec<Vec<i128>> = (0..c.variables().len())
        .map(|w| {
            (0..cols)
                .map(|i| i128::from(lhs[i] == w) - i128::from(rhs[i] == w))
                .collect()
        })
        .collect();
    rows.push(vec![1; cols]);
    let mut rhs_vec = vec![0i128; rows.len()];
    *rhs_vec.last_mut().expect("nonempty") = 1;
    solve_mod(rows, rhs_vec, modulus as i128).map(|x| x.into_iter().map(|v| v as u64).collect())
}

/// Builds `Σ c_i x_i` from the Maltsev operation `op(x, y, z) = x + y - z`,
/// starting at `x0` and adding `x_i - x0` exactly `c_i` times for `i >= 1`.
/// The coefficients must sum to 1 modulo the intended modulus.
pub fn affine_term(coefficients: &[u64], op: &str) -> Term {
    assert!(!coefficients.is_empty(), "a term needs at least one argument");
    let mut t = Term::Var(0);
    for (i, &c) in coefficients.iter().enumerate().skip(1) {
        for _ in 0..c {
            t = Term::op(op, vec![t, Term::Var(i), Term::Var(0)]);
        }
    }
    t
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`.
fn inverse(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// Solves `A x ≡ b (mod m)` via a Smith form `U A V = D` computed over the
/// integers. `U` and `V` are only ever used modulo `m`, so they are kept
/// reduced. Free coordinates of `V⁻¹ x` are set to zero.
#[allow(clippy::needless_range_loop)]
fn solve_mod(mut a: Vec<Vec<i128>>, b: Vec<i128>, m: i128) -> Option<Vec<i128>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut ub = b;
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            a.swap(t, pi);
            ub.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    ub[i] = (ub[i] - q * ub[t]).rem_euclid(m);
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for i in t..rows {
                        a[i][j] -= q * a[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] = (row[j] - q * row[t]).rem_euclid(m);
                    }
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                rank = t + 1;
                break;
            }
        }
        if rank <= t {
            break;
        }
    }
    let mut y = vec![0i128; cols];
    for t in 0..rows {
        let target = ub[t].rem_euclid(m);
        if t >= rank {
            if target != 0 {
                return None;
            }
            continue;
        }
        let d = a[t][t].rem_euclid(m);
        let g = gcd(d, m);
        if target % g != 0 {
            return None;
        }
        let mg = m / g;
        y[t] = if mg == 1 { 0 } else { (target / g) * inverse(d / g, mg) % mg };
    }
    Some(
        (0..cols)
            .map(|i| (0..cols).map(|j| v[i][j] * y[j]).sum::<i128>().rem_euclid(m))
            .collect(),
    )
}
