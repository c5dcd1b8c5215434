use proptest::prelude::*;
use std::process::{Command, Output};

fn hft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hft")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn intersect_prints_a_rational() {
    let o = hft(&["intersect", "1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/24\n");
    assert_eq!(stdout(&hft(&["intersect", "0", "0", "0", "0"])), "1\n");
}

#[test]
fn exit_codes() {
    assert_eq!(hft(&["check-axioms", &fixture("point.json")]).status.code(), Some(0));
    assert_eq!(hft(&["check-axioms", &fixture("broken-leibniz.json")]).status.code(), Some(1));
    assert_eq!(hft(&["check-axioms", "/nonexistent/algebra.json"]).status.code(), Some(3));
    assert_eq!(hft(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hft(&["correlator", &fixture("point.json"), "--genus", "0", "--ins", "0:7"]).status.code(), Some(2));
    assert_eq!(hft(&["verify", "string", &fixture("frobenius3.json"), "--max-n", "4", "--max-genus", "2"]).status.code(), Some(0));
}

#[test]
fn bare_names_resolve_to_fixtures() {
    let o = hft(&["correlator", "frobenius3", "--genus", "0", "--ins", "0:0,0:0,0:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn eliminate_reports_agreement() {
    let o = hft(&["eliminate", &fixture("strata/chain-0-5.json"), "--evaluate", &fixture("block6.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 9);
    assert!(v["evaluations"].as_array().unwrap().iter().all(|e| e["difference"] == "0"));
}

#[test]
fn potential_writes_its_file() {
    let out = std::env::temp_dir().join(format!("hft-potential-{}.json", std::process::id()));
    let o = hft(&["potential", &fixture("point.json"), "--max-n", "4", "--max-genus", "1", "--max-psi", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let _ = std::fs::remove_file(&out);
    // T₀³/3! at genus 0 and T₁/24 at genus 1.
    let coeff = |g: u64, vars: serde_json::Value| {
        v["terms"].as_array().unwrap().iter().find(|t| t["genus"] == g && t["vars"] == vars).map(|t| t["coeff"].clone())
    };
    assert_eq!(coeff(0, serde_json::json!([[0, 0], [0, 0], [0, 0]])), Some("1/6".into()));
    assert_eq!(coeff(1, serde_json::json!([[1, 0]])), Some("1/24".into()));
}

#[test]
fn search_reports_budget() {
    let o = hft(&["search-algebra", "--layout", "h0=0,0;blocks=1", "--budget", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("budget-exceeded"));
    assert_eq!(hft(&["search-algebra", "--layout", "h0=1"]).status.code(), Some(2));
}

const GOOD: [&str; 5] = ["point", "frobenius2", "frobenius3", "block6", "block12"];
const BROKEN: [&str; 7] = [
    "broken-supercommutativity",
    "broken-associativity",
    "broken-leibniz",
    "broken-seven-term",
    "broken-integral-gminus",
    "broken-nondegeneracy",
    "broken-unit",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn check_axioms_exit_code_matches_fixture(good in any::<bool>(), k in 0usize..7) {
        let name = if good { GOOD[k % GOOD.len()] } else { BROKEN[k] };
        let o = hft(&["check-axioms", &fixture(&format!("{name}.json")), "--json"]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        prop_assert_eq!(o.status.code(), Some(if good { 0 } else { 1 }));
        prop_assert_eq!(v["passed"].as_bool(), Some(good));
    }

    #[test]
    fn json_output_is_stable(k in 0usize..5, g in 0u32..2) {
        let args = ["correlator", GOOD[k], "--genus", &g.to_string(), "--ins", "1:0,0:0,0:0", "--json", "--dump-graphs"];
        let a = hft(&args);
        let b = hft(&args);
        prop_assert_eq!(a.stdout, b.stdout);
    }
}
