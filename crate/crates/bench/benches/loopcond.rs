use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use loopcond_bench::loopcond::constructions::clique_q;
use loopcond_bench::loopcond::graph::{clique, find_hom};
use loopcond_bench::loopcond::{satisfies_condition, DecisionLimits, SearchConfig, SearchMode};
use loopcond_bench::{decision_instances, hom_instances};

fn homomorphisms(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_hom");
    for (name, g, h) in hom_instances() {
        for mode in [SearchMode::Deterministic, SearchMode::Fast] {
            let cfg = SearchConfig { mode, ..SearchConfig::default() };
            group.bench_function(format!("{name}/{mode:?}"), |b| {
                b.iter(|| find_hom(black_box(&g), black_box(&h), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn clique_gadget(c: &mut Criterion) {
    let mut group = c.benchmark_group("clique_q");
    group.sample_size(10);
    for n in [3, 4] {
        let g = clique(n);
        group.bench_function(format!("k{n}"), |b| b.iter(|| clique_q(black_box(&g), n).unwrap()));
    }
    group.finish();
}

fn decisions(c: &mut Criterion) {
    let mut group = c.benchmark_group("satisfies_condition");
    let limits = DecisionLimits::default();
    for (name, alg, cond) in decision_instances() {
        group.bench_function(name, |b| {
            b.iter(|| satisfies_condition(black_box(&alg), black_box(&cond), &limits).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, homomorphisms, clique_gadget, decisions);
criterion_main!(benches);
