//! End-to-end acceptance checks. Run with
//! `cargo test -p loopcond --test acceptance -- --nocapture` to see one
//! PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use loopcond::algebra::{affine_satisfies, verify_witness, Operation};
use loopcond::classify::{classify, separation_audit, COMMUTATIVITY, SIGGERS};
use loopcond::constructions::{clique_f, verify_clique_claims, verify_cycle_reduction, walk_relation, VerifyLimits};
use loopcond::graph::{clique, cycle, directed_cycle, find_embedding, find_hom, path, petersen};
use loopcond::{
    condition_graph, parse_condition, satisfies_condition, ConditionClass, Decision, DecisionLimits, DiGraph,
    FiniteAlgebra, LoopCondition, SearchConfig, Term,
};

struct Outcome {
    pass: bool,
    json: Value,
}

fn cond(g: &DiGraph) -> LoopCondition {
    LoopCondition::from_graph("t", g).unwrap()
}

/// Every map `g -> h` by enumeration; the first one that is a homomorphism
/// (and injective if asked).
fn brute_hom(g: &DiGraph, h: &DiGraph, injective: bool) -> Option<Vec<usize>> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    (0..m.pow(n as u32)).find_map(|mut code| {
        let mut map = vec![0; n];
        for slot in map.iter_mut().rev() {
            *slot = code % m;
            code /= m;
        }
        let inj = !injective || (0..n).all(|i| (0..i).all(|j| map[i] != map[j]));
        (inj && g.edges().iter().all(|&(a, b)| h.has_edge(map[a], map[b]))).then_some(map)
    })
}

fn edge_list(g: &DiGraph) -> Value {
    json!(g.edges())
}

fn graph_assignment() -> Outcome {
    let s = condition_graph(&parse_condition(SIGGERS).unwrap());
    let c = condition_graph(&parse_condition(COMMUTATIVITY).unwrap());
    let triangle = (0..3).flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b)));
    let pass = s.vertex_count() == 3
        && s.edge_count() == 6
        && !s.has_loop()
        && s.edges().iter().copied().eq(triangle)
        && c.vertex_count() == 2
        && c.edges() == [(0, 1), (1, 0)];
    Outcome {
        pass,
        json: json!({ "siggers": edge_list(&s), "commutativity": edge_list(&c) }),
    }
}

fn classification() -> Outcome {
    let bip = [cycle(4), cycle(6), cycle(2), path(4)];
    let non = [clique(3), clique(4), clique(5), cycle(5), cycle(7), petersen()];
    let trivial = ["t(x,y,z)=t(x,z,y)", "t(x,y)=t(x,y)", "s(x,y,y,x)=s(x,x,y,y)"];
    let mut rows = Vec::new();
    let mut pass = true;
    for (graphs, want) in [(&bip[..], ConditionClass::Bipartite), (&non[..], ConditionClass::NonbipartiteLoopless)] {
        for g in graphs {
            let got = classify(&cond(g));
            pass &= got == want;
            rows.push(json!([g.vertex_count(), g.edge_count(), got.name()]));
        }
    }
    for t in trivial {
        let got = classify(&parse_condition(t).unwrap());
        pass &= got == ConditionClass::Trivial;
        rows.push(json!([t, got.name()]));
    }
    Outcome { pass, json: json!(rows) }
}

fn hom_chains() -> Outcome {
    let cfg = SearchConfig::default();
    let chain = [cycle(9), cycle(7), cycle(5), clique(3), clique(4), clique(5)];
    let mut pass = true;
    let mut witnesses = Vec::new();
    for w in chain.windows(2) {
        match find_hom(&w[0], &w[1], &cfg).unwrap() {
            Some(h) => {
                pass &= w[0].edges().iter().all(|&(a, b)| w[1].has_edge(h.map[a], h.map[b]));
                witnesses.push(json!(h.map));
            }
            None => {
                pass = false;
                witnesses.push(Value::Null);
            }
        }
    }
    let k3_c5 = find_hom(&clique(3), &cycle(5), &cfg).unwrap();
    let k4_k3 = find_embedding(&clique(4), &clique(3), &cfg).unwrap();
    pass &= k3_c5.is_none() && brute_hom(&clique(3), &cycle(5), false).is_none();
    pass &= k4_k3.is_none() && brute_hom(&clique(4), &clique(3), true).is_none();
    Outcome {
        pass,
        json: json!({ "chain": witnesses, "k3_to_c5": k3_c5.is_some(), "k4_into_k3": k4_k3.is_some() }),
    }
}

/// Pairs joined by a walk of exactly `k` steps in the symmetric cycle.
fn walk_oracle(n: usize, k: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|a| {
            let mut here = vec![false; n];
            here[a] = true;
            for _ in 0..k {
                let mut next = vec![false; n];
                for v in (0..n).filter(|&v| here[v]) {
                    next[(v + 1) % n] = true;
                    next[(v + n - 1) % n] = true;
                }
                here = next;
            }
            here
        })
        .collect()
}

fn cycle_reduction() -> Outcome {
    let mut pass = true;
    let mut out = Vec::new();
    for k in [3, 5] {
        let n = k * k;
        let walks = walk_relation(&cycle(n), k);
        let oracle = walk_oracle(n, k);
        pass &= (0..n).all(|a| (0..n).all(|b| walks.has_edge(a, b) == oracle[a][b]));
        let picked: Vec<usize> = (0..k).map(|i| i * k).collect();
        let h = walks.induced(&picked);
        let ring = (0..k).all(|i| h.has_edge(i, (i + 1) % k) && h.has_edge((i + 1) % k, i));
        pass &= ring && !h.has_loop();
        let report = verify_cycle_reduction(k, &VerifyLimits::default()).unwrap();
        pass &= report.all_pass();
        out.push(json!({ "k": k, "induced": edge_list(&h), "report": report }));
    }
    Outcome { pass, json: json!(out) }
}

fn clique_claims() -> Outcome {
    let mut pass = true;
    let mut out = Vec::new();
    for n in [3, 4] {
        let report = verify_clique_claims(n, &VerifyLimits::default()).unwrap();
        pass &= report.all_pass();
        let f = clique_f(&clique(n), n).unwrap();
        pass &= (0..n).all(|i| (0..n).all(|j| i == j || f.has_edge(i, j)));
        pass &= f.is_symmetric();
        let f_big = clique_f(&clique(n + 1), n).unwrap();
        pass &= f_big.has_loop();
        out.push(json!({ "n": n, "report": report }));
    }
    Outcome { pass, json: json!(out) }
}

fn z2_sum() -> FiniteAlgebra {
    let op = Operation::from_fn("m", 3, 2, |a| (a[0] + a[1] + a[2]) % 2);
    FiniteAlgebra::new(2, vec![op]).unwrap()
}

fn decision_vs_affine() -> Outcome {
    let z2 = z2_sum();
    let cases = [
        (SIGGERS.to_string(), true),
        (COMMUTATIVITY.to_string(), false),
        (cond(&cycle(5)).to_string(), true),
        (cond(&clique(4)).to_string(), true),
    ];
    let mut pass = true;
    let mut out = Vec::new();
    for (text, want) in cases {
        let c = parse_condition(&text).unwrap();
        let d = satisfies_condition(&z2, &c, &DecisionLimits::default()).unwrap();
        let got = match &d {
            Decision::Satisfied { witness } => {
                pass &= verify_witness(&z2, &c, witness).unwrap();
                true
            }
            Decision::NotSatisfied => false,
            Decision::ResourceExceeded { .. } => {
                pass = false;
                false
            }
        };
        pass &= got == want && affine_satisfies(2, &c).is_some() == got;
        out.push(json!({ "condition": text, "decision": d }));
    }
    Outcome { pass, json: json!(out) }
}

/// Conditions of arity up to 4 on at most 3 variables, one per renaming
/// class: the word `lhs ++ rhs` is a restricted-growth string.
fn small_conditions() -> Vec<LoopCondition> {
    fn grow(word: &mut Vec<usize>, len: usize, arity: usize, out: &mut Vec<LoopCondition>) {
        if word.len() == len {
            let name = |i: &usize| ["x", "y", "z"][*i].to_string();
            let (l, r) = word.split_at(arity);
            out.push(LoopCondition::new("t", l.iter().map(name).collect(), r.iter().map(name).collect()).unwrap());
            return;
        }
        let next = word.iter().max().map_or(0, |m| m + 1).min(2);
        for v in 0..=next {
            word.push(v);
            grow(word, len, arity, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    for arity in 1..=4 {
        grow(&mut Vec::new(), 2 * arity, arity, &mut out);
    }
    out
}

fn projection_oracle() -> Outcome {
    let p = FiniteAlgebra::projection(2);
    let all = small_conditions();
    let mut mismatches = Vec::new();
    let mut looped = 0;
    for c in &all {
        let has_loop = condition_graph(c).has_loop();
        looped += usize::from(has_loop);
        let sat = matches!(
            satisfies_condition(&p, c, &DecisionLimits::default()).unwrap(),
            Decision::Satisfied { .. }
        );
        if sat != has_loop {
            mismatches.push(c.to_string());
        }
    }
    Outcome {
        pass: mismatches.is_empty() && !all.is_empty(),
        json: json!({ "conditions": all.len(), "looped": looped, "mismatches": mismatches }),
    }
}

fn z3_audit() -> Outcome {
    let z3 = FiniteAlgebra::affine_maltsev(3);
    let comm = parse_condition(COMMUTATIVITY).unwrap();
    let coefficients = affine_satisfies(3, &comm);
    let term = Term::op("m", vec![Term::Var(0), Term::Var(0), Term::Var(1)]);
    let verified = verify_witness(&z3, &comm, &term).unwrap();
    let audit = separation_audit().unwrap();
    Outcome {
        pass: coefficients == Some(vec![2, 2]) && verified && audit.discrepancy,
        json: json!({ "coefficients": coefficients, "verified": verified, "audit": audit }),
    }
}

fn oriented_predicates() -> Outcome {
    let g = condition_graph(&parse_condition("s(a,r,e,a)=s(r,a,r,e)").unwrap());
    let cfg = SearchConfig::default();
    let length = g.algebraic_length().ok();
    let mut pass = g.is_smooth() && g.is_weakly_connected() && length == Some(1);
    for k in 2..=6 {
        let target = directed_cycle(k);
        pass &= find_hom(&g, &target, &cfg).unwrap().is_none() && brute_hom(&g, &target, false).is_none();
    }
    Outcome {
        pass,
        json: json!({ "smooth": g.is_smooth(), "weakly_connected": g.is_weakly_connected(), "algebraic_length": length }),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn criteria() -> Vec<Criterion> {
    let ms = Duration::from_millis;
    vec![
        ("graph assignment", graph_assignment, ms(1)),
        ("classification", classification, ms(1000)),
        ("homomorphism chains", hom_chains, ms(5000)),
        ("cycle reduction", cycle_reduction, ms(5000)),
        ("clique gadget claims", clique_claims, ms(60_000)),
        ("decision vs affine oracle", decision_vs_affine, ms(30_000)),
        ("projection oracle", projection_oracle, ms(60_000)),
        ("Z_3 example audit", z3_audit, Duration::MAX),
        ("oriented graph predicates", oriented_predicates, ms(1000)),
    ]
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    let mut first_run = Vec::new();
    for (i, (name, check, limit)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= limit;
        println!(
            "criterion {:>2} {name}: {} ({:.3} ms)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64() * 1e3
        );
        if !pass {
            failed.push(i + 1);
        }
        first_run.push(serde_json::to_string(&outcome.json).unwrap());
    }
    let second_run: Vec<String> =
        criteria().into_iter().map(|(_, check, _)| serde_json::to_string(&check().json).unwrap()).collect();
    let identical = first_run == second_run;
    println!("criterion 10 determinism: {}", if identical { "PASS" } else { "FAIL" });
    if !identical {
        failed.push(10);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
