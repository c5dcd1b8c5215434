//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 5 is a known failure (the Main Lemma as stated breaks on the
//! block fixtures; see README). The run exits nonzero on any other failure,
//! or if criterion 5 starts passing.

#[path = "../../hft/tests/support/dvv.rs"]
mod dvv;

use hft::correlators::{correlator, sweep, Identity, Insertion, SweepBounds};
use hft::examples::{fixture, stratum_fixture, GOOD_FIXTURES, NEGATIVE_FIXTURES, STRATA_FIXTURES};
use hft::graph::{Graph, Leaf};
use hft::psi::psi_intersection;
use hft::rational::{frac, int};
use hft::strata::{catalog, coefficient_of_final_graph, elimination_sweep, relation_sweep, StableDualGraph};
use hft::superalgebra::check_axioms;
use hft::vanishing::{phi_residuals, picture_residuals, PhiShape, Picture};
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

const KNOWN_FAILURES: [u32; 1] = [5];

fn axioms() -> Outcome {
    for name in GOOD_FIXTURES {
        let rep = check_axioms(&fixture(name).map_err(|e| e.to_string())?);
        if !rep.passed() {
            return Err(format!("{name} fails {:?}", rep.failed()));
        }
    }
    for (name, check) in NEGATIVE_FIXTURES {
        let failed = check_axioms(&fixture(name).map_err(|e| e.to_string())?).failed();
        if failed != [check] {
            return Err(format!("{name} fails {failed:?}, expected [{check}]"));
        }
    }
    Ok(format!("{} good, {} negative", GOOD_FIXTURES.len(), NEGATIVE_FIXTURES.len()))
}

fn psi() -> Outcome {
    let anchors = [(0, vec![0, 0, 0], int(1)), (1, vec![1], frac(1, 24)), (2, vec![4], frac(1, 1152))];
    for (g, a, want) in anchors {
        if psi_intersection(g, &a) != want {
            return Err(format!("<{a:?}>_{g} = {}", psi_intersection(g, &a)));
        }
    }
    let cases = dvv::oracle_cases(2, 5, 8);
    for (g, a) in &cases {
        let powers: Vec<u32> = a.iter().map(|&x| x as u32).collect();
        let got = psi_intersection(*g as u32, &powers);
        let want = dvv::dvv_oracle(*g, a);
        if got != want {
            return Err(format!("g={g} {a:?}: table {got}, oracle {want}"));
        }
    }
    Ok(format!("{} cases against the brute-force oracle", cases.len()))
}

fn point_correlators() -> Outcome {
    let p = fixture("point").map_err(|e| e.to_string())?;
    let mut count = 0;
    for (g, a) in dvv::oracle_cases(2, 4, 7) {
        let n = a.len() as i64;
        if 2 * g - 2 + n <= 0 || a.iter().sum::<i64>() != 3 * g - 3 + n {
            continue;
        }
        let powers: Vec<u32> = a.iter().map(|&x| x as u32).collect();
        let ins: Vec<Insertion> = powers.iter().map(|&k| Insertion::basis(&p, k, 0)).collect();
        let got = correlator(&p, g as u32, &ins).map_err(|e| e.to_string())?;
        if got != psi_intersection(g as u32, &powers) {
            return Err(format!("g={g} {powers:?}: {got}"));
        }
        count += 1;
    }
    Ok(format!("{count} stable cases"))
}

fn identity_sweep(which: Identity, b: SweepBounds) -> Outcome {
    let mut total = 0;
    let mut failures = vec![];
    for name in GOOD_FIXTURES {
        let alg = fixture(name).map_err(|e| e.to_string())?;
        let reps = sweep(&alg, which, b).map_err(|e| e.to_string())?;
        total += reps.len();
        let bad = reps.iter().filter(|r| !r.pass).count();
        if bad > 0 {
            let first = reps.iter().find(|r| !r.pass).unwrap();
            failures.push(format!("{name}: {bad} (e.g. {} residual {})", first.params, first.residual));
        }
    }
    if failures.is_empty() {
        Ok(format!("{total} cases"))
    } else {
        Err(format!("{total} cases; {}", failures.join("; ")))
    }
}

fn string_dilaton() -> Outcome {
    let b = SweepBounds { max_genus: 2, max_n: 4, max_psi_sum: 4, full_basis: false };
    let s = identity_sweep(Identity::String, b).map_err(|e| format!("string: {e}"))?;
    let d = identity_sweep(Identity::Dilaton, SweepBounds { full_basis: true, ..b }).map_err(|e| format!("dilaton: {e}"))?;
    Ok(format!("string (H0) {s}, dilaton {d}"))
}

fn main_lemma() -> Outcome {
    identity_sweep(Identity::MainLemma, SweepBounds { max_genus: 1, max_n: 4, max_psi_sum: 3, full_basis: true })
}

fn vanishing() -> Outcome {
    let shapes = [
        PhiShape { empty_loops: 2, heavy_loops: 0, heavy_edges: 1, leaves: 1 },
        PhiShape { empty_loops: 2, heavy_loops: 1, heavy_edges: 0, leaves: 1 },
    ];
    for name in GOOD_FIXTURES {
        let alg = fixture(name).map_err(|e| e.to_string())?;
        for p in Picture::ALL {
            if let Some((t, v)) = picture_residuals(&alg, p).map_err(|e| e.to_string())?.first() {
                return Err(format!("{name} {}: {t:?} -> {v}", p.name()));
            }
        }
        for shape in shapes {
            if let Some((t, v)) = phi_residuals(&alg, shape).map_err(|e| e.to_string())?.first() {
                return Err(format!("{name} {shape:?}: {t:?} -> {v}"));
            }
        }
    }
    Ok("4 pictures and 2 shapes".into())
}

fn elimination() -> Outcome {
    let mut total = 0;
    for name in GOOD_FIXTURES {
        let alg = fixture(name).map_err(|e| e.to_string())?;
        for s in STRATA_FIXTURES {
            let st = stratum_fixture(s).map_err(|e| e.to_string())?;
            for c in elimination_sweep(&alg, &st, false).map_err(|e| e.to_string())? {
                if c.white != c.eliminated {
                    return Err(format!("{name} {s} {:?}: white {} eliminated {}", c.leaves, c.white, c.eliminated));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} H0 leaf assignments"))
}

fn relations() -> Outcome {
    let mut total = 0;
    for name in GOOD_FIXTURES {
        let alg = fixture(name).map_err(|e| e.to_string())?;
        for r in catalog() {
            for rep in relation_sweep(&alg, &r, false).map_err(|e| e.to_string())? {
                if !rep.pass || !rep.consistent {
                    return Err(format!("{name} {} {}: white {} eliminated {}", rep.name, rep.params, rep.white, rep.eliminated));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} H0 leaf assignments"))
}

fn final_graphs() -> Outcome {
    let y04 = Graph { vertices: vec![0], heavy_edges: vec![], leaves: (1..=4).map(|label| Leaf { vertex: 0, psi: 0, label }).collect() };
    let d = StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]]);
    let a = coefficient_of_final_graph(&d, &y04).map_err(|e| e.to_string())?;
    let y11 = Graph { vertices: vec![1], heavy_edges: vec![], leaves: vec![Leaf { vertex: 0, psi: 0, label: 1 }] };
    let b = coefficient_of_final_graph(&StableDualGraph::smooth(1, &[1]), &y11).map_err(|e| e.to_string())?;
    if a == int(1) && b == frac(1, 24) {
        Ok("(12|34) -> 1, psi1 on M11 -> 1/24".into())
    } else {
        Err(format!("(12|34) -> {a}, psi1 -> {b}"))
    }
}

fn json_stability() -> Outcome {
    let commands: [&[&str]; 10] = [
        &["check-axioms", "block6", "--json"],
        &["check-axioms", "broken-seven-term", "--json"],
        &["intersect", "2", "4", "--json"],
        &["correlator", "block6", "--genus", "1", "--ins", "0:0,1:2,0:3", "--dump-graphs", "--json"],
        &["potential", "frobenius3", "--max-n", "4", "--json"],
        &["verify", "dilaton", "block6", "--max-n", "3", "--json"],
        &["verify", "main-lemma", "block6", "--max-n", "4", "--full-basis", "--json"],
        &["verify-relation", "wdvv-pullback", "block12", "--json"],
        &["eliminate", "chain-0-5", "--evaluate", "block6", "--merge", "--json"],
        &["search-algebra", "--layout", "h0=0,0;blocks=1", "--budget", "2000", "--json"],
    ];
    for args in commands {
        let run = || Command::new(env!("CARGO_BIN_EXE_hft")).args(args).output().map_err(|e| e.to_string());
        let (a, b) = (run()?, run()?);
        if a.stdout.is_empty() || a.stdout != b.stdout || a.status.code() != b.status.code() {
            return Err(format!("hft {} differs between runs", args.join(" ")));
        }
        if serde_json::from_slice::<serde_json::Value>(&a.stdout).is_err() {
            return Err(format!("hft {} printed invalid JSON", args.join(" ")));
        }
    }
    Ok(format!("{} commands", commands.len()))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, u64, Check); 10] = [
        (1, "axiom suite", 5, axioms),
        (2, "psi intersections vs oracle", 10, psi),
        (3, "point correlators", 10, point_correlators),
        (4, "string and dilaton", 120, string_dilaton),
        (5, "main lemma", 120, main_lemma),
        (6, "vanishing pictures and phi", 5, vanishing),
        (7, "white edge elimination", 60, elimination),
        (8, "tautological relations", 120, relations),
        (9, "final graph coefficients", 1, final_graphs),
        (10, "json determinism", 60, json_stability),
    ];
    let mut unexpected = vec![];
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let res = check();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > Duration::from_secs(limit) => Err(format!("{msg}, but over the {limit} s limit")),
            r => r,
        };
        let known = KNOWN_FAILURES.contains(&id);
        let (tag, detail) = match &res {
            Ok(m) => ("PASS", m.clone()),
            Err(m) => ("FAIL", if known { format!("{m} [known failure]") } else { m.clone() }),
        };
        println!("{tag} {id:>2} {name} ({:.2} s): {detail}", took.as_secs_f64());
        if res.is_ok() == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
