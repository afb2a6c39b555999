use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use loopcond::algebra::{affine_satisfies, affine_term, verify_witness, AlgebraError};
use loopcond::classify::{classification, implies_by_hom, separation_audit};
use loopcond::constructions::{verify_clique_claims, verify_cycle_reduction, VerifyLimits};
use loopcond::graph::{SearchMode, DEFAULT_BUDGET};
use loopcond::{
    condition_graph, parse_condition, satisfies_condition, Decision, DecisionLimits, FiniteAlgebra, LoopCondition,
    SearchConfig,
};

#[derive(Parser)]
#[command(name = "loopcond", version, about = "Loop conditions, their graphs and finite algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an identity and print its graph.
    Parse {
        equation: String,
        /// Graphviz output.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the class of a condition and what it is equivalent to.
    Classify {
        equation: String,
        #[arg(long)]
        json: bool,
    },
    /// Look for a homomorphism between the graphs of two conditions.
    Implies {
        first: String,
        second: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Smallest-domain-first search; the witness may differ between versions.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a finite algebra satisfies a condition.
    Satisfies {
        #[arg(long, required_unless_present = "affine")]
        algebra: Option<PathBuf>,
        equation: String,
        #[arg(long, default_value_t = loopcond::algebra::DEFAULT_MAX_ENTRIES)]
        max_entries: usize,
        #[arg(long, default_value_t = loopcond::algebra::DEFAULT_MAX_ELEMENTS)]
        max_elements: usize,
        /// Solve over (Z_M, x+y-z) directly; cross-checked when an algebra is also given.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        affine: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Check the cycle and clique constructions by brute force.
    Verify {
        #[arg(long, value_name = "N")]
        clique_n: usize,
        #[arg(long, value_name = "K")]
        cycle_k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Structural predicates of a condition's graph.
    GraphInfo {
        equation: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare the affine algebras on Z_2 and Z_3 against commutativity and the triangle.
    Audit {
        #[arg(long)]
        json: bool,
    },
}

/// Exit code 2 with a message on standard error.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn condition(text: &str) -> Result<LoopCondition, Failure> {
    parse_condition(text).map_err(|e| Failure(format!("cannot parse `{text}`: {e}")))
}

fn emit(json_mode: bool, value: &Value, human: impl FnOnce() -> String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{}", human());
    }
}

fn answer(positive: bool) -> ExitCode {
    if positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Parse { equation, dot, json } => {
            let c = condition(&equation)?;
            let g = condition_graph(&c);
            if dot {
                print!("{}", g.to_dot());
            } else {
                let value = json!({ "condition": c.to_string(), "variables": c.variables(), "graph": g });
                emit(json, &value, || {
                    let edges: Vec<String> =
                        g.edges().iter().map(|&(a, b)| format!("{} -> {}", g.label(a), g.label(b))).collect();
                    format!("{c}\nvertices: {}\nedges: {}", c.variables().join(" "), edges.join(", "))
                });
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { equation, json } => {
            let cl = classification(&condition(&equation)?);
            emit(json, &serde_json::to_value(&cl)?, || format!("{}\n{}", cl.class, cl.note));
            Ok(ExitCode::SUCCESS)
        }
        Command::Implies {
            first,
            second,
            budget,
            fast,
            json,
        } => {
            let (c, d) = (condition(&first)?, condition(&second)?);
            let mode = if fast { SearchMode::Fast } else { SearchMode::Deterministic };
            let hom = implies_by_hom(&c, &d, &SearchConfig { budget, mode })?;
            let value = json!({ "established": hom.is_some(), "homomorphism": hom.as_ref().map(|h| &h.map) });
            emit(json, &value, || match &hom {
                Some(h) => {
                    let (gc, gd) = (condition_graph(&c), condition_graph(&d));
                    let pairs: Vec<String> =
                        h.map.iter().enumerate().map(|(v, &w)| format!("{} -> {}", gc.label(v), gd.label(w))).collect();
                    format!("implies via {}", pairs.join(", "))
                }
                None => "not established".into(),
            });
            Ok(answer(hom.is_some()))
        }
        Command::Satisfies {
            algebra,
            equation,
            max_entries,
            max_elements,
            affine,
            json,
        } => {
            let c = condition(&equation)?;
            let mut value = json!({});
            let mut holds = None;
            if let Some(m) = affine {
                let coefficients = affine_satisfies(m, &c);
                let term = coefficients.as_ref().map(|x| affine_term(x, "m"));
                if let Some(t) = &term {
                    let alg = FiniteAlgebra::affine_maltsev(m as usize);
                    if !verify_witness(&alg, &c, t)? {
                        return Err(Failure(format!("affine term {t} fails to verify")));
                    }
                }
                value["affine"] = json!({ "modulus": m, "coefficients": coefficients, "term": term });
                holds = Some(coefficients.is_some());
            }
            if let Some(path) = algebra {
                let text = fs::read_to_string(&path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                let alg: FiniteAlgebra =
                    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                let limits = DecisionLimits {
                    max_entries,
                    max_elements,
                };
                let decision = match satisfies_condition(&alg, &c, &limits) {
                    Err(e @ AlgebraError::ExponentCap { .. }) => return Err(Failure(e.to_string())),
                    other => other?,
                };
                let found = match &decision {
                    Decision::Satisfied { .. } => Some(true),
                    Decision::NotSatisfied => Some(false),
                    Decision::ResourceExceeded { .. } => None,
                };
                value["algebra"] = serde_json::to_value(&decision)?;
                if let (Some(a), Some(b)) = (holds, found) {
                    value["agree"] = json!(a == b);
                    if a != b {
                        emit(json, &value, || "closure and affine oracle disagree".into());
                        return Err(Failure("closure and affine oracle disagree".into()));
                    }
                }
                if found.is_none() {
                    emit(json, &value, || format!("{decision:?}"));
                    return Ok(ExitCode::from(2));
                }
                holds = holds.or(found);
            }
            let holds = holds.expect("one method ran");
            emit(json, &value, || {
                let mut lines = vec![if holds { "Satisfied" } else { "NotSatisfied" }.to_string()];
                if let Some(t) = value["algebra"]["witness"].as_str() {
                    lines.push(format!("witness: {t}"));
                }
                if let Some(t) = value["affine"]["term"].as_str() {
                    lines.push(format!("affine term: {t}"));
                }
                lines.join("\n")
            });
            Ok(answer(holds))
        }
        Command::Verify {
            clique_n,
            cycle_k,
            json,
        } => {
            let limits = VerifyLimits::default();
            let mut report = verify_cycle_reduction(cycle_k, &limits)?;
            report.extend(verify_clique_claims(clique_n, &limits)?);
            emit(json, &serde_json::to_value(&report)?, || {
                report
                    .checks
                    .iter()
                    .map(|c| format!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(answer(report.all_pass()))
        }
        Command::GraphInfo { equation, json } => {
            let g = condition_graph(&condition(&equation)?);
            let symmetric = g.is_symmetric();
            let value = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "symmetric": symmetric,
                "loop": g.has_loop(),
                "bipartite": g.is_bipartite().ok(),
                "odd_girth": g.odd_girth().ok().flatten(),
                "smooth": g.is_smooth(),
                "weakly_connected": g.is_weakly_connected(),
                "algebraic_length": g.algebraic_length().ok(),
            });
            emit(json, &value, || {
                let fields = value.as_object().expect("object");
                fields.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { json } => {
            let audit = separation_audit()?;
            emit(json, &serde_json::to_value(&audit)?, || {
                format!("discrepancy: {}\n{}", audit.discrepancy, audit.note)
            });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
