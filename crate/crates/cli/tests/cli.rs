use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clo(args: &[&str]) -> Output {
    clo_with_env(args, None)
}

fn clo_with_env(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_clo"));
    cmd.args(args).env_remove("CLO_CONFIG");
    if let Some(path) = config {
        cmd.env("CLO_CONFIG", path);
    }
    cmd.output().expect("binary runs")
}

fn envelope(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn ef_reports_distinguishing_rank() {
    let out = clo(&["--json", "ef", "--rank", "3", "omega", "zeta"]);
    assert_eq!(code(&out), 0);
    let v = envelope(&out);
    assert_eq!(v["command"], "ef");
    assert_eq!(v["result"]["equivalent"], false);
    assert_eq!(v["result"]["distinguishingRank"], 2);
}

#[test]
fn classify_exit_codes() {
    let out = clo(&["--json", "classify", "eta"]);
    assert_eq!(code(&out), 0);
    assert_eq!(envelope(&out)["result"]["verdict"], "Categorical");

    let out = clo(&["--json", "classify", "--rank-budget", "2", "--depth", "0", "sh(pt[a],pt[b],pt[c])"]);
    assert_eq!(code(&out), 2);
    assert_eq!(envelope(&out)["result"]["verdict"], "Unknown");

    let out = clo(&["--json", "classify", "zeta"]);
    assert_eq!(code(&out), 0);
    let v = envelope(&out);
    assert_eq!(v["result"]["verdict"], "BorelComplete");
    assert!(v["result"]["certificate"].is_string());
}

#[test]
fn errors_exit_with_one() {
    let out = clo(&["parse", "w(pt[a]"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
    assert_eq!(code(&clo(&["no-such-command"])), 1);
    assert_eq!(code(&clo(&["ef", "--rank", "9", "eta", "eta"])), 1);
    assert_eq!(code(&clo(&["enum-m", "--colors", "4", "--level", "1"])), 1);
}

#[test]
fn json_is_deterministic() {
    let args = ["--json", "itypes", "--rank", "2", "pt[a] + eta + pt[b]"];
    let mut a = envelope(&clo(&args));
    let mut b = envelope(&clo(&args));
    a.as_object_mut().unwrap().remove("timing_ms");
    b.as_object_mut().unwrap().remove("timing_ms");
    assert_eq!(a, b);
}

#[test]
fn terms_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("corpus.terms");
    std::fs::write(&file, "# two terms\nq = eta\nz = zeta\n").unwrap();
    let q = format!("@{}#q", file.display());
    let z = format!("@{}#z", file.display());
    let out = clo(&["--json", "ef", "--rank", "3", &q, &z]);
    assert_eq!(code(&out), 0);
    assert_eq!(envelope(&out)["result"]["equivalent"], false);
    let whole = format!("@{}", file.display());
    assert_eq!(code(&clo(&["print", &whole])), 1);
}

#[test]
fn config_file_sets_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("clo.toml");
    std::fs::write(&cfg, "rank-budget = 1\noutput-format = \"json\"\n").unwrap();
    let out = clo_with_env(&["ef", "omega", "zeta"], Some(&cfg));
    let v = envelope(&out);
    assert_eq!(v["budgets"]["rank"], 1);
    assert_eq!(v["result"]["equivalent"], true);

    std::fs::write(&cfg, "rank-budget = 1\nbogus = 3\n").unwrap();
    assert_eq!(code(&clo_with_env(&["print", "eta"], Some(&cfg))), 1);
}

#[test]
fn witness_is_replayed() {
    let out = clo(&["--json", "witness", "--rank", "2", "omega", "zeta"]);
    assert_eq!(code(&out), 0);
    let v = envelope(&out);
    assert_eq!(v["result"]["checked"], true);
    assert_eq!(v["result"]["transcript"]["rank"], 2);
}

#[test]
fn structures_round_trip_through_the_codec() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    std::fs::write(&a, r#"{"universe":2,"relations":[{"name":"R","arity":2,"tuples":[[0,1]]}]}"#).unwrap();
    std::fs::write(&b, r#"{"universe":2,"relations":[{"name":"R","arity":2,"tuples":[[1,0]]}]}"#).unwrap();
    std::fs::write(&c, r#"{"universe":2,"relations":[{"name":"R","arity":2,"tuples":[[0,0]]}]}"#).unwrap();
    let (a, b, c) = (a.to_str().unwrap(), b.to_str().unwrap(), c.to_str().unwrap());

    let out = clo(&["--json", "verify-reduction", "--rank", "6", a, b]);
    assert_eq!(code(&out), 0);
    let v = envelope(&out);
    assert_eq!(v["result"]["iso_oracle"], true);
    assert_eq!(v["result"]["consistent"], true);

    let v = envelope(&clo(&["--json", "verify-reduction", "--rank", "6", a, c]));
    assert_eq!(v["result"]["iso_oracle"], false);
    assert!(v["result"]["distinguishing_rank"].is_u64());

    let out = clo(&["encode", "--depth", "1", "--mix", "1", a]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("pt[]"));
}

#[test]
fn census_report() {
    let out = clo(&["--json", "census", "--family", "tn", "--n", "4", "--trunc", "3", "--rank", "6"]);
    assert_eq!(code(&out), 0);
    let v = envelope(&out);
    assert_eq!(v["result"]["modelCount"], 4);
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(v["result"]["pairMatrix"].as_array().unwrap().len(), 4);
}

#[test]
fn editing_commands() {
    let out = clo(&["print", "eta + pt[a] + eta"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "sh(pt[]) + pt[a] + sh(pt[])");
    let v = envelope(&clo(&["--json", "splice", "--rank", "4", "omega + zeta", "zeta", "zeta + zeta"]));
    assert_eq!(v["result"]["resultEquivalent"], true);
    let v = envelope(&clo(&["--json", "drop", "--rank", "2", "--types", "2", "pt[a] + eta + pt[b]"]));
    assert_eq!(v["result"]["term"], "pt[a] + sh(pt[])");
    let v = envelope(&clo(&["--json", "enum-m", "--colors", "1", "--level", "1"]));
    assert_eq!(v["result"]["members"].as_array().unwrap().len(), 9);
    let v = envelope(&clo(&["--json", "selfadd", "--rank", "3", "zeta"]));
    assert_eq!(v["result"]["selfAdditive"], true);
    let v = envelope(&clo(&["--json", "condense", "--rank", "2", "zeta + zeta + zeta"]));
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 3);
    let out = clo(&["--json", "suite", "--criterion", "2"]);
    assert_eq!(code(&out), 0);
}
