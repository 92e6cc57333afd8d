use periodkit::error::Error;
use periodkit::motive_model::{random_hodge, synthesize_motive, SyntheticSpec};
use periodkit::scalar_algebra::{Cyclo, CycloField, FieldPair, NumberField};
use periodkit_cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn cli(args: &[&str]) -> (i32, Value) {
    let out = run(std::iter::once("periodkit").chain(args.iter().copied()));
    (out.code, out.report.unwrap_or(Value::Null))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("periodkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Write a synthetic motive over Q / Q(i) and return its path.
fn motive_file(name: &str, n: usize, w: i64, seed: u64) -> PathBuf {
    let k = CycloField::new(12);
    let e = NumberField::new("Q", &[0, 1]).unwrap();
    let f = NumberField::new("Q(i)", &[1, 0, 1]).unwrap();
    let pair = FieldPair::<Cyclo>::new(&k, &e, &f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hodge = match random_hodge(&pair, n, w, 3, true, &mut rng) {
        Ok(h) => h,
        Err(Error::MiddleClass(why)) => panic!("choose an odd weight: {}", why),
        Err(e) => panic!("{}", e),
    };
    let m = synthesize_motive(&pair, &SyntheticSpec::new(name, n, w, hodge, seed)).unwrap();
    let path = scratch(&format!("{}.json", name));
    std::fs::write(&path, serde_json::to_string_pretty(&m.to_json()).unwrap()).unwrap();
    path
}

#[test]
fn envelope_carries_tool_version_and_config() {
    let (code, rep) = cli(&["critical", "--hodge", "[[0,3],[3,0]]"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(rep["tool"], "periodkit");
    assert_eq!(rep["version"], periodkit_cli::VERSION);
    assert_eq!(rep["verdict"], "pass");
    assert_eq!(rep["config"]["command"]["critical"]["hodge"], "[[0,3],[3,0]]");
    assert_eq!(rep["result"]["critical_points"], serde_json::json!([1, 2, 3]));
}

#[test]
fn middle_class_is_refused() {
    let (code, rep) = cli(&["critical", "--hodge", "[[1,1]]"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(rep["result"]["refused"].is_string());
    assert!(rep["result"]["critical_points"].is_null());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(cli(&["verify", "--suite", "tensor"]).0, EXIT_USAGE);
    assert_eq!(cli(&["verify", "--suite", "bogus", "--seed", "1", "--count", "1"]).0, EXIT_USAGE);
    assert_eq!(cli(&["decompose", "--exact", "24", "--float", "30"]).0, EXIT_USAGE);
    assert_eq!(cli(&["split", "--p", "[1,0]"]).0, EXIT_USAGE);
    let (code, rep) = cli(&["validate", "--input", "/nonexistent/motive.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(rep["verdict"], "error");
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(["periodkit", "--version"]);
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.report.is_none());
    assert!(out.text.contains(periodkit_cli::VERSION));
    assert_eq!(run(["periodkit", "verify", "--help"]).code, EXIT_PASS);
}

#[test]
fn malformed_json_reports_position() {
    let (code, rep) = cli(&["critical", "--hodge", "[[0,3],\n[3,"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(rep["error"]["line"], 2);
    assert!(rep["error"]["column"].as_u64().is_some());
}

#[test]
fn decompose_degrees_add_up() {
    let (code, rep) = cli(&["decompose", "--e", "Q(i):1,0,1", "--f", "Q(i):1,0,1", "--exact", "N=12"]);
    assert_eq!(code, EXIT_PASS);
    let d = &rep["result"]["degree_check"];
    assert_eq!(d["sum_of_component_degrees"], 4);
    assert_eq!(d["degree_product"], 4);
}

#[test]
fn split_exponent_lists() {
    let (code, rep) = cli(&["split", "--p", "[3,1,-1]", "--w", "2", "--r", "[1,0]", "--w2", "1"]);
    assert_eq!(code, EXIT_PASS);
    let sp: Vec<usize> = serde_json::from_value(rep["result"]["M"].clone()).unwrap();
    let sp2: Vec<usize> = serde_json::from_value(rep["result"]["M'"].clone()).unwrap();
    // one index per j in 0..=n
    assert_eq!(sp.len(), 4);
    assert_eq!(sp2.len(), 3);
    assert_eq!(sp.iter().sum::<usize>(), 2);
    assert_eq!(sp2.iter().sum::<usize>(), 3);
}

#[test]
fn motive_files_validate_and_give_periods() {
    let path = motive_file("M", 2, 3, 5);
    let p = path.to_str().unwrap();
    let (code, rep) = cli(&["validate", "--input", p, "--exact", "N=12"]);
    assert_eq!(code, EXIT_PASS, "{}", rep);
    assert_eq!(rep["result"]["valid"], true);

    let (code, rep) = cli(&["periods", "--input", p, "--exact", "N=12"]);
    assert_eq!(code, EXIT_PASS, "{}", rep);
    let sigmas = rep["result"]["sigmas"].as_array().unwrap();
    assert_eq!(sigmas.len(), 1);
    assert_eq!(sigmas[0]["sign_relation"], "zero");
    assert_eq!(sigmas[0]["Q"].as_array().unwrap().len(), 2);
    assert_eq!(sigmas[0]["Q_cumulative"].as_array().unwrap().len(), 3);

    // files hold scalars in the writer's representation
    for other in [["--float", "60"], ["--exact", "N=24"]] {
        let (code, rep) = cli(&[&["periods", "--input", p][..], &other[..]].concat());
        assert_eq!(code, EXIT_USAGE);
        assert!(rep["error"]["message"].as_str().unwrap().contains("exact N=12"), "{}", rep);
    }
}

#[test]
fn broken_motive_fails_validation() {
    let path = motive_file("Mbroken", 2, 3, 6);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // exponents no longer strictly decreasing
    v["hodge_exponents"]["0"] = serde_json::json!([1, 1]);
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, rep) = cli(&["validate", "--input", path.to_str().unwrap(), "--exact", "N=12"]);
    assert_eq!(code, EXIT_FAIL, "{}", rep);
}

#[test]
fn split_table_from_two_motives() {
    let a = motive_file("A", 2, 3, 7);
    let b = motive_file("B", 2, 2, 8);
    let (code, rep) = cli(&[
        "split",
        "--input",
        a.to_str().unwrap(),
        "--input2",
        b.to_str().unwrap(),
        "--exact",
        "N=12",
    ]);
    assert_eq!(code, EXIT_PASS, "{}", rep);
    assert!(rep["result"]["table"].is_object() || rep["result"]["table"].is_array());
}

#[test]
fn formula_emits_and_refuses() {
    let pi = r#"{"n":1,"weight":"0","A":{"s1":["1"],"bar(s1)":["-1"]}}"#;
    let chi = r#"{"n":1,"weight":"0","A":{"s1":["0"],"bar(s1)":["0"]}}"#;
    let (code, rep) = cli(&["formula", "--kind", "deligne", "--pi", pi, "--pi2", chi, "--m", "0"]);
    assert_eq!(code, EXIT_PASS, "{}", rep);
    assert!(rep["result"]["text"].as_str().unwrap().contains("Q"));
    // past the critical strip
    let (code, rep) = cli(&["formula", "--kind", "deligne", "--pi", pi, "--pi2", chi, "--m", "5"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(rep["result"]["refused"].is_string());
    assert_eq!(cli(&["formula", "--kind", "nonsense"]).0, EXIT_USAGE);
}

#[test]
fn rewrite_equivalence_and_ablation() {
    let uni = r#"{"sigmas":["s1"],"chars":["chi"]}"#;
    let (code, rep) = cli(&[
        "rewrite",
        "--universe",
        uni,
        "--expr",
        "p[chi;s1]^2 * p[c(chi);s1]",
        "--equiv",
        "p[c(chi);s1] * p[chi;s1] * p[chi;s1]",
    ]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(rep["result"]["equivalence"]["holds"], true);
    let (code, _) = cli(&["rewrite", "--universe", uni, "--expr", "p[chi;s1]", "--equiv", "p[c(chi);s1]"]);
    assert_eq!(code, EXIT_FAIL);

    let (code, _) = cli(&["rewrite", "--derivation", "local-periods", "--n", "3", "--r", "2"]);
    assert_eq!(code, EXIT_PASS);
    let (code, rep) =
        cli(&["rewrite", "--derivation", "local-periods", "--n", "3", "--r", "2", "--without", "tate-conjecture"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(rep["verdict"], "fail");
    assert_eq!(cli(&["rewrite", "--without", "no-such-assumption", "--expr", "1"]).0, EXIT_USAGE);
}

#[test]
fn binary_writes_report_file() {
    let out = scratch("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_periodkit"))
        .args(["critical", "--hodge", "[[2,0],[0,2]]", "--output"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_PASS));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["config"]["output"], out.to_str().unwrap());

    let bad = Command::new(env!("CARGO_BIN_EXE_periodkit")).arg("frobnicate").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
}
