use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn fixture(rel: &str) -> PathBuf {
    corpus().join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goodcolim")).args(args).env_remove("GOODCOLIM_CORPUS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn first_result(o: &Output) -> Value {
    let report: Value = serde_json::from_str(&stdout(o)).expect("json report");
    report["sections"][0]["results"][0].clone()
}

fn factorize_to(dir: &Path, mode: &str, budget: &str) -> (Output, PathBuf) {
    let out = dir.join(format!("{mode}.json"));
    let morphism = fixture("morphisms/f_empty_to_E1.json");
    let gens = fixture("generators/x_std.json");
    let o = run(&["factorize", "--mode", mode, "--budget", budget, p(&morphism), p(&gens), "--out", p(&out), "--json"]);
    (o, out)
}

#[test]
fn fat_factorization_of_the_edge_takes_three_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = factorize_to(dir.path(), "fat", "5");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = first_result(&o);
    assert_eq!(r["outcome"], "converged");
    assert_eq!(r["iterations"], 3);
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(cert["cert_version"], 1);
    assert_eq!(cert["status"], "converged");
    assert_eq!(cert["iterations"], 3);
    assert_eq!(cert["iteration_chain"]["stages"].as_array().unwrap().len(), 3);
}

#[test]
fn classical_factorization_has_an_isomorphic_middle_object() {
    let dir = tempfile::tempdir().unwrap();
    let (fat, fat_out) = factorize_to(dir.path(), "fat", "5");
    let (classical, classical_out) = factorize_to(dir.path(), "classical", "5");
    assert_eq!(code(&fat), 0);
    assert_eq!(code(&classical), 0);
    let middle = |path: &Path| {
        let cert: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let cod = &cert["right"]["dom"];
        (cod["vertices"].as_array().unwrap().len(), cod["edges"].as_array().unwrap().len())
    };
    assert_eq!(middle(&fat_out), (2, 1));
    assert_eq!(middle(&classical_out), (2, 1));
}

#[test]
fn zero_budget_exhausts() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = factorize_to(dir.path(), "fat", "0");
    assert_eq!(code(&o), 2);
    assert_eq!(first_result(&o)["outcome"], "budget_exhausted");
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(cert["status"], "budget_exhausted");
}

#[test]
fn fresh_certificates_verify_also_with_larger_probes() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out) = factorize_to(dir.path(), "fat", "8");
    for extra in [&[][..], &["--max-vertices", "10"][..]] {
        let mut args = vec!["verify", p(&out)];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    }
    let o = run(&["verify", p(&fixture("certs/fat_empty_to_E1.json"))]);
    assert_eq!(code(&o), 0);
}

#[test]
fn tampered_certificate_names_the_witness() {
    let o = run(&["verify", p(&fixture("broken/tampered_cert.json")), "--json"]);
    assert_eq!(code(&o), 1);
    let r = first_result(&o);
    assert_eq!(r["outcome"], "failed");
    assert_eq!(r["locator"]["operation"], "verify");
    assert_eq!(r["locator"]["at"], "fat/links/c2.1/po");
}

#[test]
fn tampering_a_fresh_certificate_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out) = factorize_to(dir.path(), "fat", "8");
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let steps = cert["left"]["chain"]["steps"].as_array_mut().unwrap();
    let step = steps.iter_mut().find(|s| s["vmap"].as_object().is_some_and(|m| !m.is_empty())).unwrap();
    let targets: Vec<Value> = step["cod"]["vertices"].as_array().unwrap().clone();
    let (k, v) = step["vmap"].as_object().unwrap().iter().next().map(|(k, v)| (k.clone(), v.clone())).unwrap();
    let other = targets.iter().find(|t| **t != v).unwrap().clone();
    step["vmap"][k] = other;
    std::fs::write(&out, serde_json::to_string(&cert).unwrap()).unwrap();
    let o = run(&["verify", p(&out), "--json"]);
    assert_eq!(code(&o), 1);
    assert!(first_result(&o)["locator"]["at"].as_str().unwrap().starts_with("fat/chain/step"));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let o = run(&["factorize", p(&fixture("broken/malformed.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3 column"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_limits_are_input_errors() {
    let o = run(&["factorize", "no/such/file.json"]);
    assert_eq!(code(&o), 1);
    let o = run(&["factorize", p(&fixture("morphisms/f_empty_to_E1.json")), "--max-homs", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("limits"));
}

#[test]
fn broken_diagram_names_the_smoothness_violation() {
    let o = run(&["linearize", p(&fixture("broken/nonsmooth.json")), "--json"]);
    assert_eq!(code(&o), 1);
    let r = first_result(&o);
    assert_eq!(r["locator"]["operation"], "validate_smooth");
    assert_eq!(r["locator"]["at"], "top");
}

#[test]
fn broken_corpus_fails_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let diagrams = dir.path().join("diagrams");
    std::fs::create_dir(&diagrams).unwrap();
    std::fs::copy(fixture("broken/nonsmooth.json"), diagrams.join("nonsmooth.json")).unwrap();
    let o = run(&["suite", p(dir.path()), "--count", "3", "--json"]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let section = report["sections"].as_array().unwrap().iter().find(|s| s["name"] == "corpus/diagrams").unwrap();
    assert_eq!(section["results"][0]["locator"]["operation"], "validate_smooth");
}

#[test]
fn linearize_pushdown_and_retract_certificates_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("linearize", "diagrams/d00.json"),
        ("pushdown", "pushdown/p00.json"),
        ("eliminate-retract", "retract/r00.json"),
    ];
    for (cmd, input) in cases {
        let out = dir.path().join(format!("{cmd}.json"));
        let o = run(&[cmd, p(&fixture(input)), "--out", p(&out)]);
        assert_eq!(code(&o), 0, "{cmd}: {}{}", stdout(&o), stderr(&o));
        let v = run(&["verify", p(&out)]);
        assert_eq!(code(&v), 0, "{cmd}: {}", stdout(&v));
    }
}

#[test]
fn retract_elimination_without_budget_is_inconclusive() {
    let o = run(&["eliminate-retract", p(&fixture("retract/r00.json")), "--budget", "0", "--json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(first_result(&o)["outcome"], "inconclusive");
}

#[test]
fn complete_poset_adds_a_top_to_a_span() {
    let o = run(&["complete-poset", p(&fixture("posets/span.json"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out: Value = serde_json::from_str(stdout(&o).split("complete-poset").next().unwrap()).unwrap();
    assert_eq!(out["poset"]["elements"].as_array().unwrap().len(), 4);
    assert!(out["added_top"].is_string());
}

#[test]
fn default_suite_passes_with_enough_instances() {
    let o = run(&["suite", p(&corpus()), "--json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for name in ["linearize", "limit_extension", "star_extend", "mono_oracle", "lifting", "pushdown", "eliminate_retract"] {
        let s = report["sections"].as_array().unwrap().iter().find(|s| s["name"] == name).unwrap();
        assert!(s["instances"].as_u64().unwrap() >= 200, "{name}");
        assert_eq!(s["failures"], 0);
    }
}

#[test]
fn corpus_directory_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_goodcolim"))
        .args(["suite", "--count", "2"])
        .env("GOODCOLIM_CORPUS", corpus())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("corpus/morphisms"));
    let o = Command::new(env!("CARGO_BIN_EXE_goodcolim"))
        .args(["suite", "--count", "2"])
        .env("GOODCOLIM_CORPUS", "/no/such/dir")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn golden_suite_report_is_byte_identical() {
    let golden = std::fs::read_to_string(fixture("golden/suite_seed7_count20.json")).unwrap();
    let o = run(&["suite", p(&corpus()), "--seed", "7", "--count", "20", "--json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o) == golden, "suite report drifted from the golden file");
}
