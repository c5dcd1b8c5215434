use clap::{Parser, Subcommand, ValueEnum};
use hft::correlators::{graph_terms, potential_coefficients, sweep, Correlators, Identity, IdentityReport, PotentialBounds, SweepBounds};
use hft::examples::{fixture_dir, load_algebra_file, spec_json};
use hft::psi::psi_intersection;
use hft::rational::fmt;
use hft::search::{search_block_algebra, SearchOutcome, SearchSpace};
use hft::strata::{
    eliminate_white, elimination_sweep, merge_decorated, relation_sweep, DecoratedTerm,
    Relation, StableDualGraph,
};
use hft::superalgebra::check_axioms;
use hft::{Algebra, Rational};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "hft", version, about = "Exact correlators and identity checks for cyclic Hodge algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every axiom of a cyclic Hodge algebra.
    CheckAxioms {
        algebra: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// ⟨τ_{a1}…τ_{an}⟩_g on the moduli space of curves.
    Intersect {
        genus: u32,
        powers: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
    /// A basis correlator, insertions written "a:i,a:i,...".
    Correlator {
        algebra: PathBuf,
        #[arg(long)]
        genus: u32,
        #[arg(long, default_value = "")]
        ins: String,
        /// Also print the contributing graphs with their weights V·P.
        #[arg(long)]
        dump_graphs: bool,
        #[arg(long)]
        json: bool,
    },
    /// Truncated potential coefficients in the primary variables.
    Potential {
        algebra: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_psi: u32,
        #[arg(long, default_value_t = 1)]
        max_genus: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Sweep string, dilaton or Main Lemma instances.
    Verify {
        which: Which,
        algebra: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_genus: u32,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_psi_sum: u32,
        /// Insert every basis vector instead of H₀ only.
        #[arg(long)]
        full_basis: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a tautological relation on every basis leaf assignment.
    VerifyRelation {
        relation: PathBuf,
        algebra: PathBuf,
        #[arg(long)]
        full_basis: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decorated graphs replacing the white edges of a stratum.
    Eliminate {
        stratum: PathBuf,
        /// Compare white and eliminated values on this algebra.
        #[arg(long)]
        evaluate: Option<PathBuf>,
        /// Sum isomorphic decorated graphs.
        #[arg(long)]
        merge: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search for a block algebra with small structure constants.
    SearchAlgebra {
        /// For example "h0=0,0;blocks=1".
        #[arg(long)]
        layout: String,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    String,
    Dilaton,
    MainLemma,
}

enum Failure {
    Usage(String),
    File(String),
}

type Outcome = Result<bool, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn file(e: impl std::fmt::Display) -> Failure {
    Failure::File(e.to_string())
}

/// A bare name such as `block6` refers to the fixture directory.
fn resolve(p: &Path) -> PathBuf {
    resolve_in(p, "")
}

/// A bare name is looked up in the fixture directory (or one of its subdirectories).
fn resolve_in(p: &Path, sub: &str) -> PathBuf {
    if p.exists() || p.components().count() > 1 || p.extension().is_some() {
        return p.to_path_buf();
    }
    fixture_dir().join(sub).join(p).with_extension("json")
}

fn algebra(p: &Path) -> Result<Algebra, Failure> {
    load_algebra_file(&resolve(p)).map_err(file)
}

fn print(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn r(x: &Rational) -> String {
    fmt(x)
}

fn parse_insertions(s: &str, dim: usize) -> Result<Vec<(u32, usize)>, Failure> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (a, i) = part.split_once(':').ok_or_else(|| usage(format!("insertion {part:?} is not a:i")))?;
        let a: u32 = a.trim().parse().map_err(|_| usage(format!("bad ψ-power in {part:?}")))?;
        let i: usize = i.trim().parse().map_err(|_| usage(format!("bad basis index in {part:?}")))?;
        if i >= dim {
            return Err(usage(format!("basis index {i} out of range for dimension {dim}")));
        }
        out.push((a, i));
    }
    Ok(out)
}

fn check_axioms_cmd(path: &Path, as_json: bool) -> Outcome {
    let alg = algebra(path)?;
    let rep = check_axioms(&alg);
    if as_json {
        print(&json!({ "passed": rep.passed(), "checks": rep.checks }));
    } else {
        for c in &rep.checks {
            match &c.witness {
                None => outln!("{:<20} pass", c.name),
                Some(w) => outln!("{:<20} FAIL at {:?}: residual {}", c.name, w.indices, r(&w.residual)),
            }
        }
    }
    Ok(rep.passed())
}

fn correlator_cmd(path: &Path, g: u32, ins: &str, dump: bool, as_json: bool) -> Outcome {
    let alg = algebra(path)?;
    let ins = parse_insertions(ins, alg.dim())?;
    let ctx = Correlators::new(&alg).map_err(usage)?;
    let value = ctx.basis(g, &ins).map_err(usage)?;
    let graphs = if dump {
        let psi: Vec<u32> = ins.iter().map(|x| x.0).collect();
        let terms = graph_terms(g, &psi).map_err(usage)?;
        Some(terms.iter().map(|t| json!({ "graph": t.graph, "weight": r(&t.weight) })).collect::<Vec<_>>())
    } else {
        None
    };
    if as_json {
        let mut v = json!({ "genus": g, "insertions": ins, "value": r(&value) });
        if let Some(gs) = graphs {
            v["graphs"] = Value::Array(gs);
        }
        print(&v);
    } else {
        outln!("{}", r(&value));
        for g in graphs.unwrap_or_default() {
            outln!("{}", serde_json::to_string(&g).expect("serializable"));
        }
    }
    Ok(true)
}

fn report_lines(reports: &[IdentityReport], as_json: bool, label: &str) -> bool {
    let failed: Vec<&IdentityReport> = reports.iter().filter(|x| !x.pass).collect();
    if as_json {
        print(&json!({ "identity": label, "cases": reports.len(), "failed": failed.len(), "failures": failed }));
    } else {
        outln!("{label}: {} cases, {} failed", reports.len(), failed.len());
        for f in &failed {
            outln!("FAIL {}: left {} right {} residual {}", f.params, r(&f.left), r(&f.right), r(&f.residual));
        }
    }
    failed.is_empty()
}

fn eliminate_cmd(path: &Path, evaluate: Option<&Path>, merge: bool, as_json: bool) -> Outcome {
    let s = StableDualGraph::from_json_file(&resolve_in(path, "strata")).map_err(file)?;
    let labeled = eliminate_white(&s).map_err(usage)?;
    let terms: Vec<DecoratedTerm> = if merge { merge_decorated(&labeled) } else { labeled.clone() };
    let mut comparisons = vec![];
    let mut ok = true;
    if let Some(ap) = evaluate {
        let alg = algebra(ap)?;
        for c in elimination_sweep(&alg, &s, false).map_err(usage)? {
            ok &= c.white == c.eliminated;
            comparisons.push((c.leaves, c.white, c.eliminated));
        }
    }
    if as_json {
        let mut v = json!({ "edges": s.edges.len(), "terms": terms });
        if evaluate.is_some() {
            v["evaluations"] = comparisons
                .iter()
                .map(|(t, w, e)| json!({ "leaves": t, "white": r(w), "eliminated": r(e), "difference": r(&(w - e)) }))
                .collect();
        }
        print(&v);
    } else {
        for t in &terms {
            let decs: Vec<String> = t.graph.decorations.iter().map(|d| format!("{d:?}")).collect();
            outln!("{:>8}  [{}]", r(&t.coefficient), decs.join(" "));
        }
        for (t, w, e) in &comparisons {
            outln!("leaves {t:?}: white {} eliminated {} difference {}", r(w), r(e), r(&(w - e)));
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::CheckAxioms { algebra, json } => check_axioms_cmd(&algebra, json),
        Cmd::Intersect { genus, powers, json } => {
            let v = psi_intersection(genus, &powers);
            if json {
                print(&json!({ "genus": genus, "powers": powers, "value": r(&v) }));
            } else {
                outln!("{}", r(&v));
            }
            Ok(true)
        }
        Cmd::Correlator { algebra, genus, ins, dump_graphs, json } => correlator_cmd(&algebra, genus, &ins, dump_graphs, json),
        Cmd::Potential { algebra: path, max_n, max_psi, max_genus, out, json } => {
            let alg = algebra(&path)?;
            let pot = potential_coefficients(&alg, PotentialBounds { max_n, max_psi, max_genus }).map_err(usage)?;
            let text = pot.to_json();
            if let Some(o) = &out {
                std::fs::write(o, format!("{text}\n")).map_err(|e| file(format!("{}: {e}", o.display())))?;
            }
            if json || out.is_none() {
                outln!("{text}");
            } else {
                outln!("{} coefficients written to {}", pot.terms.len(), out.as_ref().expect("checked").display());
            }
            Ok(true)
        }
        Cmd::Verify { which, algebra: path, max_genus, max_n, max_psi_sum, full_basis, json } => {
            let alg = algebra(&path)?;
            let (id, label) = match which {
                Which::String => (Identity::String, "string"),
                Which::Dilaton => (Identity::Dilaton, "dilaton"),
                Which::MainLemma => (Identity::MainLemma, "main-lemma"),
            };
            let reports = sweep(&alg, id, SweepBounds { max_genus, max_n, max_psi_sum, full_basis }).map_err(usage)?;
            Ok(report_lines(&reports, json, label))
        }
        Cmd::VerifyRelation { relation, algebra: path, full_basis, json } => {
            let rel = Relation::from_json_file(&resolve_in(&relation, "relations")).map_err(file)?;
            let alg = algebra(&path)?;
            let reports = relation_sweep(&alg, &rel, full_basis).map_err(usage)?;
            let failed: Vec<_> = reports.iter().filter(|x| !x.pass).collect();
            let inconsistent = reports.iter().filter(|x| !x.consistent).count();
            if json {
                print(&json!({ "relation": rel.name, "cases": reports.len(), "failed": failed.len(), "inconsistent": inconsistent, "failures": failed }));
            } else {
                outln!("{}: {} cases, {} failed, {} inconsistent", rel.name, reports.len(), failed.len(), inconsistent);
                for f in &failed {
                    outln!("FAIL {}: white {} eliminated {}", f.params, r(&f.white), r(&f.eliminated));
                }
            }
            Ok(failed.is_empty())
        }
        Cmd::Eliminate { stratum, evaluate, merge, json } => eliminate_cmd(&stratum, evaluate.as_deref(), merge, json),
        Cmd::SearchAlgebra { layout, budget, out, json } => {
            let space = SearchSpace::parse_layout(&layout).map_err(usage)?;
            let outcome = search_block_algebra(&space, budget);
            let (status, nodes) = match &outcome {
                SearchOutcome::Found { nodes, .. } => ("found", *nodes),
                SearchOutcome::Exhausted { nodes } => ("exhausted", *nodes),
                SearchOutcome::BudgetExceeded { nodes } => ("budget-exceeded", *nodes),
            };
            if let (Some(o), Some(a)) = (&out, outcome.algebra()) {
                std::fs::write(o, spec_json(a)).map_err(|e| file(format!("{}: {e}", o.display())))?;
            }
            if json {
                let alg: Option<Value> = outcome.algebra().map(|a| serde_json::from_str(&spec_json(a)).expect("valid json"));
                print(&json!({ "layout": layout, "status": status, "nodes": nodes, "algebra": alg }));
            } else {
                outln!("{status} after {nodes} nodes");
                if let (None, Some(a)) = (&out, outcome.algebra()) {
                    outln!("{}", spec_json(a).trim_end());
                }
            }
            Ok(outcome.algebra().is_some())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::File(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
