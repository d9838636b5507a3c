use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const V_POSET: &str = r#"{"elements":["a","b","c"],"covers":[["a","c"],["b","c"]]}"#;

fn unit(x: &str, p: u64) -> String {
    format!(r#"{{"field":{{"kind":"prime","p":{p}}},"entries":[{{"from":"{x}","to":"{x}","value":"1"}}]}}"#)
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.write("v.json", V_POSET);
        for x in ["a", "b", "c"] {
            ws.write(&format!("e{x}.json"), &unit(x, 2));
            ws.write(&format!("e{x}3.json"), &unit(x, 3));
        }
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    /// Runs the binary with `args` in the workspace directory.
    fn run(&self, args: &[&str]) -> (i32, String) {
        self.run_env(args, &[])
    }

    fn run_env(&self, args: &[&str], env: &[(&str, &str)]) -> (i32, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_incidence"))
            .args(args)
            .env_remove("PRESERVER_JOBS")
            .envs(env.iter().copied())
            .current_dir(self.dir.path())
            .output()
            .unwrap();
        (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
    }
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout.trim()).unwrap()
}

fn construct_ab(ws: &Workspace, extra: &[&str]) -> (i32, String) {
    let mut args = vec!["preserver-construct", "--poset", "v.json", "--field", "2", "--epsilon", "ea.json", "--eta", "eb.json"];
    args.extend_from_slice(extra);
    ws.run(&args)
}

#[test]
fn poset_info_on_v_poset() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["poset-info", "--poset", "v.json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with(r#"{"connected":true,"dimension":5,"automorphisms":2,"orbits":[["a","b"],["c"]]"#), "{out}");
    assert_eq!(parse(&out)["length"], 1);
}

#[test]
fn decide_reports_pair_count_obstruction() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["preserver-decide", "--poset", "v.json", "--field", "2", "--epsilon", "ea.json", "--eta", "ec.json"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"exists":false,"obstruction":{"pair_count":[3,2]}}"#);
}

#[test]
fn decide_positive_carries_witness_and_verification() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["preserver-decide", "--poset", "v.json", "--field", "3", "--epsilon", "ea3.json", "--eta", "eb3.json"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["exists"], true);
    assert_eq!(v["verification"]["holds"], true);
    assert_eq!(v["witness"]["lambda"][0], serde_json::json!(["a", "b"]));
}

#[test]
fn constructed_map_verifies_exhaustively() {
    let ws = Workspace::new();
    let (code, _) = construct_ab(&ws, &["--out", "m.json"]);
    assert_eq!(code, 0);
    let (code, out) = ws.run(&["preserver-verify", "--map", "m.json", "--epsilon", "ea.json", "--eta", "eb.json", "--mode", "exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["holds"], true);
    let (code, out) = ws.run(&["lemma-suite", "--map", "m.json", "--epsilon", "ea.json", "--eta", "eb.json"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["all_hold"], true);
    let (code, out) = ws.run(&["zp-check", "--map", "m.json", "--field", "2", "--exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out), serde_json::json!({"preserves_zero_products": true, "exhaustive": true}));
}

#[test]
fn identity_map_fails_for_distinct_idempotents() {
    let ws = Workspace::new();
    construct_ab(&ws, &["--out", "m.json"]);
    // the identity map over the same basis
    let mut file = parse(&ws.read("m.json"));
    let d = file["basis"].as_array().unwrap().len();
    file["matrix"] = (0..d).map(|i| (0..d).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>()).collect();
    ws.write("id.json", &file.to_string());
    let (code, out) = ws.run(&["preserver-verify", "--map", "id.json", "--epsilon", "ea.json", "--eta", "eb.json"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["holds"], false);
    assert!(v["counterexample"]["f"].is_object());
}

#[test]
fn written_files_round_trip_bit_identically() {
    let ws = Workspace::new();
    construct_ab(&ws, &["--out", "m.json"]);
    let (_, stdout_map) = construct_ab(&ws, &[]);
    assert_eq!(stdout_map.trim(), ws.read("m.json"));
    // loading and re-writing an element reproduces it
    let (_, reloaded) = ws.run(&["algebra-eval", "--poset", "v.json", "--field", "2", "--op", "square", "--a", "ea.json"]);
    assert_eq!(parse(&reloaded)["result"], parse(&ws.read("ea.json")));
    construct_ab(&ws, &["--out", "m2.json"]);
    assert_eq!(ws.read("m.json"), ws.read("m2.json"));
}

#[test]
fn sampled_reports_are_deterministic() {
    let ws = Workspace::new();
    construct_ab(&ws, &["--out", "m.json"]);
    let args = ["preserver-verify", "--map", "m.json", "--epsilon", "ea.json", "--eta", "eb.json", "--mode", "sampled", "--n", "200", "--seed", "7"];
    let first = ws.run(&args);
    let second = ws.run_env(&args, &[("PRESERVER_JOBS", "1")]);
    assert_eq!(first, second);
    let v = parse(&first.1);
    assert_eq!(v["mode"], serde_json::json!({"kind": "sampled", "n": 200, "seed": 7}));
    assert_eq!(v["holds"], true);
}

#[test]
fn sigma_and_sign_options() {
    let ws = Workspace::new();
    ws.write(
        "sigma.json",
        r#"{"field":{"kind":"prime","p":3},"entries":[{"from":"a","to":"c","value":"2"},{"from":"b","to":"c","value":"2"}]}"#,
    );
    let (code, out) = ws.run(&[
        "preserver-construct", "--poset", "v.json", "--field", "3", "--epsilon", "ea3.json", "--eta", "eb3.json",
        "--sign", "-1", "--sigma", "sigma.json", "--out", "neg.json",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(parse(&out)["pm_automorphism"], "negative_of_automorphism");
    let (code, out) = ws.run(&["preserver-verify", "--map", "neg.json", "--epsilon", "ea3.json", "--eta", "eb3.json"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["holds"], true);
    let (code, out) = construct_ab(&ws, &["--sign", "2"]);
    assert_eq!(code, 1);
    assert_eq!(parse(&out)["error"]["kind"], "BadOptions");
}

#[test]
fn domain_errors_exit_one_with_report() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["preserver-construct", "--poset", "v.json", "--field", "2", "--epsilon", "ea.json", "--eta", "ec.json"]);
    assert_eq!(code, 1);
    assert_eq!(parse(&out)["error"]["kind"], "NoPreserver");
    let (code, out) = ws.run(&["poset-info", "--poset", "missing.json"]);
    assert_eq!(code, 1);
    assert_eq!(parse(&out)["error"]["kind"], "Io");
    ws.write("cyclic.json", r#"{"elements":["a","b"],"covers":[["a","b"],["b","a"]]}"#);
    let (code, out) = ws.run(&["poset-info", "--poset", "cyclic.json"]);
    assert_eq!(code, 1);
    assert_eq!(parse(&out)["error"]["kind"], "CycleDetected");
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new();
    assert_eq!(ws.run(&["no-such-verb"]).0, 2);
    assert_eq!(ws.run(&["preserver-decide", "--poset", "v.json"]).0, 2);
    assert_eq!(ws.run(&["preserver-verify", "--map", "m.json", "--epsilon", "ea.json", "--eta", "eb.json", "--mode", "fast"]).0, 2);
}

#[test]
fn square_roots_and_classification() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["square-roots", "--poset", "v.json", "--p", "3", "--y", "a"]);
    assert_eq!(code, 0);
    // e_a + g with g in the radical of I({b, c}): g = t e_bc, g^2 = 0, both signs
    assert_eq!(parse(&out)["count"], 6);
    let (_, out) = ws.run(&["algebra-eval", "--poset", "v.json", "--field", "2", "--op", "classify", "--a", "ec.json"]);
    assert_eq!(parse(&out), serde_json::json!({"class": "primitive", "base": "c"}));
    let (_, out) = ws.run(&["algebra-eval", "--poset", "v.json", "--field", "2", "--op", "sum", "--a", "ea.json", "--b", "eb.json"]);
    let sum = parse(&out)["result"].to_string();
    ws.write("eab.json", &sum);
    let (_, out) = ws.run(&["algebra-eval", "--poset", "v.json", "--field", "2", "--op", "classify", "--a", "eab.json"]);
    assert_eq!(parse(&out)["class"], "non_primitive");
}

#[test]
fn bruteforce_census_and_pretty_output() {
    let ws = Workspace::new();
    let (code, out) = ws.run(&["bruteforce", "--poset", "v.json", "--p", "2", "--x", "a", "--y", "c", "--pretty"]);
    assert_eq!(code, 0);
    assert!(out.contains("\n  \"x\": \"a\""), "{out}");
    let v = parse(&out);
    assert_eq!(v["preservers_found"], 0);
    assert_eq!(v["total"], 9_999_360u64);
    let (code, out) = ws.run(&["bruteforce", "--poset", "v.json", "--p", "2", "--x", "a", "--y", "c", "--max-dim", "4"]);
    assert_eq!(code, 1);
    assert_eq!(parse(&out)["error"]["kind"], "TooLarge");
}

#[test]
fn jobs_flag_does_not_change_reports() {
    let ws = Workspace::new();
    let args = ["preserver-decide", "--poset", "v.json", "--field", "3", "--epsilon", "ea3.json", "--eta", "eb3.json"];
    let base = ws.run(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend_from_slice(&["--jobs", "2"]);
    assert_eq!(ws.run(&with_jobs), base);
    assert_eq!(ws.run_env(&args, &[("PRESERVER_JOBS", "3")]), base);
}
