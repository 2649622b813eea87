use std::path::PathBuf;
use std::process::Command;

use recigal_cli::{run, schema, Outcome, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use serde_json::{json, Value};

fn go(args: &[&str]) -> Outcome {
    let mut v = vec!["recigal"];
    v.extend_from_slice(args);
    run(v)
}

fn doc(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", o.stdout, o.stderr))
}

fn tmp(name: &str, contents: &str) -> String {
    let mut p = PathBuf::from(std::env::temp_dir());
    p.push(format!("recigal-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

fn legendre() -> String {
    tmp("legendre.json", r#"{"q": 5, "a_invariants": {"a2": "-1,-1", "a4": "0,1"}}"#)
}

fn assert_valid(o: &Outcome) -> Value {
    let d = doc(o);
    let v = schema::validate(&d);
    assert!(v.valid, "{:?}\n{}", v.errors, o.stdout);
    d
}

#[test]
fn hodge_report() {
    let o = go(&["hodge", "--n", "2", "--d", "4"]);
    assert_eq!(o.code, EXIT_OK);
    let d = assert_valid(&o);
    assert_eq!(d["result"]["N"], "21");
    assert_eq!(d["result"]["hodge"], json!(["1", "19", "1"]));
    assert_eq!(d["result"]["K"], Value::Null);
    let d = assert_valid(&go(&["hodge", "--n", "2", "--d", "9"]));
    assert_eq!(d["result"]["K"]["is_rational"], true);
    assert_eq!(d["result"]["congruence_pass"], true);
}

#[test]
fn sieve_bound_toy() {
    let p = tmp("toy.json", r#"{"omegas": ["1/2", "1/2"], "x": "1"}"#);
    let o = go(&["sieve-bound", "--problem", &p]);
    assert_eq!(o.code, EXIT_OK);
    let d = assert_valid(&o);
    assert_eq!(d["result"]["bound"], "1/4");
    assert_eq!(d["result"]["h"], "4");
    assert_eq!(d["result"]["lambdas"][0]["lambda"], "1");
    // explicit support and remainders
    let p = tmp(
        "toy2.json",
        r#"{"omegas": ["1/2", "1/3"], "support": [[], [0]], "remainders": [{"set": [0], "r": "1/10"}]}"#,
    );
    // g({0}) = (1/2)/(1 - 1/2) = 1, so h = 1 + 1
    let d = assert_valid(&go(&["sieve-bound", "--problem", &p]));
    assert_eq!(d["result"]["h"], "2");
    let bad = tmp("bad.json", r#"{"omegas": ["3/2"]}"#);
    assert_eq!(go(&["sieve-bound", "--problem", &bad]).code, EXIT_ERROR);
    let bad = tmp("float.json", r#"{"omegas": [0.5]}"#);
    assert_eq!(go(&["sieve-bound", "--problem", &bad]).code, EXIT_USAGE);
    let bad = tmp("bad2.json", r#"{"omegas": "x"}"#);
    assert_eq!(go(&["sieve-bound", "--problem", &bad]).code, EXIT_USAGE);
}

#[test]
fn classify_exit_codes() {
    let o = go(&["classify", "--poly", "1,0,3,0,1"]);
    assert_eq!(o.code, EXIT_OK);
    let d = assert_valid(&o);
    assert_eq!(d["result"]["group"], "W4+");
    assert_eq!(d["result"]["status"]["kind"], "certified");

    // lift of x^5 - x - 1 with too few primes
    let o = go(&["classify", "--poly", "1,1,-5,-4,5,3,5,-4,-5,1,1", "--prime-budget", "5"]);
    assert_eq!(o.code, EXIT_INCONCLUSIVE, "{}", o.stderr);
    assert_valid(&o);

    assert_eq!(go(&["classify", "--poly", "1,2,3,4,5"]).code, EXIT_ERROR);
    assert_eq!(go(&["classify", "--poly", "1,x,1"]).code, EXIT_USAGE);
    assert_eq!(go(&["classify"]).code, EXIT_USAGE);
    assert_eq!(go(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(go(&["hodge", "--n", "2", "--d", "4", "--bogus"]).code, EXIT_USAGE);
    assert_eq!(go(&["--prime-budget", "0", "hodge", "--n", "2", "--d", "4"]).code, EXIT_USAGE);
    assert_eq!(go(&["--help"]).code, EXIT_OK);
}

#[test]
fn chebotarev_option() {
    let o = go(&["classify", "--poly", "1,3,8,3,1", "--chebotarev", "20000"]);
    let d = assert_valid(&o);
    assert_eq!(d["result"]["chebotarev"]["pass"], true);
}

#[test]
fn finite_field_commands() {
    let d = assert_valid(&go(&["count-irred", "--q", "5", "--m", "3"]));
    // monic irreducible cubics over F_5: (125 - 5)/3 = 40
    assert_eq!(d["result"]["total"], "40");
    let n = assert_valid(&go(&["count-irred", "--q", "5", "--m", "3", "--norm"]));
    assert_eq!(n["result"]["buckets"], d["result"]["buckets"]);

    // x^2 + 1 over F_7 is irreducible
    let d = assert_valid(&go(&["classify-h", "--q", "7", "--h", "1,0,1"]));
    assert_eq!(d["result"]["in_p_n"], true);
    assert_eq!(go(&["classify-h", "--q", "7", "--h", "1,0,2"]).code, EXIT_USAGE);

    let d = assert_valid(&go(&["orth-enum", "--q", "3", "--n", "2"]));
    let order: u64 = d["result"]["order"].as_str().unwrap().parse().unwrap();
    let cosets = d["result"]["cosets"].as_array().unwrap();
    assert_eq!(cosets.len(), 4);
    for c in cosets {
        let k: u64 = c["count"].as_str().unwrap().parse().unwrap();
        assert_eq!(4 * k, order);
    }
    let d = assert_valid(&go(&["orth-stats", "--q", "3", "--n", "3", "--disc", "nonsq"]));
    assert_eq!(d["result"]["cosets"].as_array().unwrap().len(), 4);

    let d = assert_valid(&go(&["wstats", "--n", "3"]));
    assert_eq!(d["result"]["order"], "48");
    let d = assert_valid(&go(&["wstats", "--n", "3", "--plus"]));
    assert_eq!(d["result"]["order"], "24");
}

#[test]
fn density_commands() {
    let d = assert_valid(&go(&["density", "--n", "4", "--class", "2", "--ells", "7,11", "--c", "1"]));
    assert_eq!(d["result"]["mode"], "experiment");
    assert_eq!(d["result"]["densities"].as_array().unwrap().len(), 2);
    let d = assert_valid(&go(&["density", "--scan", "--ells", "7", "--ns", "3"]));
    assert_eq!(d["result"]["mode"], "scan");
    assert_eq!(go(&["density", "--det", "3"]).code, EXIT_USAGE);
}

#[test]
fn lfunc_commands() {
    let c = legendre();
    let o = go(&["lfunc", "--curve", &c, "--twist", "2,0,1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let d = assert_valid(&o);
    // u(0) u(1) = 2 * 3 is a square mod 5
    assert_eq!(d["result"]["L"]["epsilon"], "1");
    assert_eq!(d["result"]["L"]["N"], "4");
    let places: Vec<&str> = d["result"]["places"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["kodaira"].as_str().unwrap())
        .collect();
    assert!(places.contains(&"I2*"), "{places:?}");

    let model = tmp("model.json", r#"{"q": "7", "model": {"A": "-3", "B": "2,1"}}"#);
    assert_valid(&go(&["lfunc", "--curve", &model, "--twist", "1,0,0,1"]));
    assert_eq!(go(&["lfunc", "--curve", &c, "--twist", "1,2,1"]).code, EXIT_ERROR);
    let missing = tmp("nomodel.json", r#"{"q": 5}"#);
    assert_eq!(go(&["lfunc", "--curve", &missing]).code, EXIT_USAGE);

    let args = ["--seed", "9", "lfunc-survey", "--curve", &c, "--d", "2", "--sample", "6"];
    let a = go(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    let d = assert_valid(&a);
    assert_eq!(d["result"]["sampled"], "6");
    assert_eq!(d["config"]["seed"], "9");
    // byte-identical reruns
    assert_eq!(go(&args).stdout, a.stdout);
}

#[test]
fn schema_rejects_and_migrates() {
    let o = go(&["hodge", "--n", "2", "--d", "3"]);
    let mut d = doc(&o);
    assert!(schema::validate(&d).valid);

    let mut bad = d.clone();
    bad["result"]["N"] = json!(6);
    let v = schema::validate(&bad);
    assert!(!v.valid);
    assert!(v.errors.iter().any(|e| e.contains("result.N")), "{:?}", v.errors);

    let mut bad = d.clone();
    bad["result"]["hodge"] = json!("0,6,0");
    assert!(!schema::validate(&bad).valid);

    let mut bad = d.clone();
    bad.as_object_mut().unwrap().remove("config");
    assert!(!schema::validate(&bad).valid);

    let mut bad = d.clone();
    bad["schema"] = json!("recigal-report/7");
    assert!(!schema::validate(&bad).valid);

    // version 0 used `params`
    let cfg = d.as_object_mut().unwrap().remove("config").unwrap();
    d["params"] = cfg;
    d["schema"] = json!("recigal-report/0");
    let v = schema::validate(&d);
    assert!(v.valid, "{:?}", v.errors);
    assert_eq!(v.warnings.len(), 1);

    // through the CLI
    let good = tmp("good.json", &o.stdout);
    let r = go(&["validate-report", "--report", &good]);
    assert_eq!(r.code, EXIT_OK);
    assert_valid(&r);
    let corrupt = tmp("corrupt.json", &serde_json::to_string(&bad).unwrap());
    let r = go(&["validate-report", "--report", &corrupt]);
    assert_eq!(r.code, EXIT_ERROR);
    assert_eq!(doc(&r)["result"]["valid"], false);
}

#[test]
fn table_and_timing() {
    let o = go(&["--output", "table", "hodge", "--n", "2", "--d", "4"]);
    assert!(o.stdout.contains("result.N = 21"), "{}", o.stdout);
    assert!(o.stdout.contains("config.tolerance = 0.05"));
    let o = go(&["--timing", "hodge", "--n", "2", "--d", "4"]);
    let d = assert_valid(&o);
    assert!(d["timing_ms"]["float-sanity"].is_number());
    let o = go(&["hodge", "--n", "2", "--d", "4"]);
    assert!(doc(&o).get("timing_ms").is_none());
}

#[test]
fn binary_exit_codes_and_env() {
    let bin = env!("CARGO_BIN_EXE_recigal");
    let out = Command::new(bin).args(["hodge", "--n", "2", "--d", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let out = Command::new(bin).args(["--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let out = Command::new(bin)
        .args(["classify", "--poly", "1,1,-5,-4,5,3,5,-4,-5,1,1"])
        .env("RECIGAL_PRIME_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INCONCLUSIVE));
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["config"]["prime_budget"], "5");
    let out = Command::new(bin)
        .args(["--threads", "1", "wstats", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
}
