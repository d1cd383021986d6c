use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibrelogic"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn workspace() -> TempDir {
    let dir = TempDir::new().unwrap();
    let mo2 = run(dir.path(), &["algebra", "gen", "mo2", "--format", "json"]);
    assert_eq!(code(&mo2), 0);
    write(&dir, "mo2.json", &stdout(&mo2));
    write(
        &dir,
        "o6model.json",
        r#"{"base_kind": "finset", "omega": "o6", "signature": {
            "sorts": {"S": {"kind": "finset", "carrier": ["x1"]}},
            "predicates": {"P": {"args": ["S"], "table": ["b"]}, "Q": {"args": ["S"], "table": ["a"]}}}}"#,
    );
    write(
        &dir,
        "mo2model.json",
        r#"{"base_kind": "finset", "omega": "mo2.json", "signature": {
            "sorts": {"S": {"kind": "finset", "carrier": ["u", "v"]}},
            "predicates": {"P": {"args": ["S"], "table": ["a", "b"]}, "Q": {"args": ["S"], "table": ["a'", "1"]}}}}"#,
    );
    write(
        &dir,
        "sierpinski.json",
        r#"{"base_kind": "fintop", "omega": "2-chain", "objects": {
            "S": {"kind": "fintop", "carrier": ["0", "1"], "opens": [[], ["1"], ["0", "1"]]},
            "P": {"kind": "fintop", "carrier": ["*"], "opens": [[], ["*"]]}}}"#,
    );
    dir
}

#[test]
fn algebra_commands() {
    let dir = workspace();
    let d = dir.path();
    let out = run(d, &["algebra", "check", "--file", "mo2.json", "--class", "orthomodular"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = run(d, &["algebra", "check", "--file", "o6", "--class", "orthomodular", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let failed: Vec<&Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["law"], "orthomodular");
    assert_eq!(code(&run(d, &["algebra", "check", "--file", "boolean(3)"])), 0);
    assert_eq!(code(&run(d, &["algebra", "check", "--file", "mo2.json", "--class", "boolean"])), 1);
    assert_eq!(code(&run(d, &["algebra", "check", "--file", "mo2.json", "--class", "modular-ish"])), 2);

    write(&dir, "broken.json", "{\"carrier\": [");
    let out = run(d, &["algebra", "check", "--file", "broken.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    write(&dir, "q2.json", r#"{"dim": 2, "generators": [[["1", "0"]], [["1", "1"]]], "size_cap": 50}"#);
    let out = run(d, &["algebra", "gen", "--subspace", "q2.json", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["carrier"].as_array().unwrap().len(), 6);
    write(&dir, "q2lattice.json", &stdout(&out));
    assert_eq!(code(&run(d, &["algebra", "check", "--file", "q2lattice.json", "--class", "orthomodular"])), 0);
}

#[test]
fn frobenius_exit_codes() {
    let dir = workspace();
    let d = dir.path();
    let out = run(d, &["laws", "frobenius", "--omega", "mo2.json", "--sizes", "2,1", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let check = &json(&out)["checks"][0];
    assert_eq!(check["law"], "frobenius");
    assert_eq!(check["witness"]["v"]["(x1,x1)"], "a");
    assert_eq!(check["witness"]["v"]["(x2,x1)"], "a'");
    assert_eq!(check["witness"]["w"]["x1"], "b");
    assert_eq!(check["witness"]["exists_of_meet"]["x1"], "0");
    assert_eq!(check["witness"]["meet_of_exists"]["x1"], "b");
    assert_eq!(code(&run(d, &["laws", "frobenius", "--omega", "boolean(2)", "--sizes", "2,2"])), 0);
    assert_eq!(code(&run(d, &["laws", "frobenius", "--omega", "mo2", "--sizes", "2"])), 2);
}

#[test]
fn hyperdoctrine_laws() {
    let dir = workspace();
    let d = dir.path();
    for args in [
        &["laws", "adjunction", "--omega", "o6", "--sizes", "2,2"][..],
        &["laws", "bc", "--omega", "mo2", "--sizes", "1,2,2"],
        &["laws", "comprehension", "--omega", "mo2", "--sizes", "2,2"],
        &["laws", "generic", "--omega", "boolean(2)", "--sizes", "2"],
        &["laws", "adjunction", "--model", "sierpinski.json", "--objects", "S,P", "--adjoint", "exists"],
        &["laws", "bc", "--model", "sierpinski.json", "--objects", "S,S,P"],
    ] {
        let out = run(d, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stdout(&out));
        assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
    }
    // equality on the Sierpiński space does not lift into the open fibre
    let out = run(d, &["laws", "adjunction", "--model", "sierpinski.json", "--objects", "S", "--adjoint", "equality", "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["checks"][0]["witness"].get("lifting").is_some());
    // the generic object is specific to finite sets
    assert_eq!(code(&run(d, &["laws", "generic", "--model", "sierpinski.json", "--objects", "S"])), 2);
    assert_eq!(code(&run(d, &["laws", "generic", "--model", "sierpinski.json", "--sizes", "2"])), 2);
    assert_eq!(code(&run(d, &["laws", "generic", "--model", "sierpinski.json", "--objects", "Q"])), 2);
    // 6^9 tables exceed the default fibre bound
    assert_eq!(code(&run(d, &["laws", "adjunction", "--omega", "mo2", "--sizes", "3,3"])), 2);
    assert_eq!(code(&run(d, &["laws", "adjunction", "--omega", "mo2", "--sizes", "3,3", "--fibre-bound", "10"])), 2);
}

#[test]
fn model_commands() {
    let dir = workspace();
    let d = dir.path();
    let out = run(d, &["model", "fibre", "--model", "sierpinski.json", "--objects", "S", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["size"], 3);
    let out = run(d, &["model", "eval", "--model", "mo2model.json", "exists x:S. P(x)", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["values"][0]["value"], "1");
    let out = run(d, &["model", "eval", "--model", "mo2model.json", "y:S ; P(y) & Q(y)", "--format", "json"]);
    let v = json(&out);
    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|v| v["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["0", "b"]);
    assert_eq!(code(&run(d, &["model", "eval", "--model", "mo2model.json", "R(x)"])), 2);
    assert_eq!(code(&run(d, &["model", "fibre", "--omega", "mo2", "--sizes", "9"])), 2);
}

#[test]
fn topos_and_universe() {
    let dir = workspace();
    let d = dir.path();
    let out = run(d, &["topos", "build", "--omega", "2-chain", "--check", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["objects"].as_array().unwrap().len(), 8);
    assert!(v["laws"]["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    let out = run(d, &["topos", "build", "--omega", "mo2", "--check"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL associativity"));
    assert_eq!(code(&run(d, &["topos", "build", "--omega", "mo2"])), 0);
    assert_eq!(code(&run(d, &["topos", "build", "--omega", "mo2", "--cap", "3"])), 2);
    assert_eq!(code(&run(d, &["topos", "build", "--model", "sierpinski.json"])), 2);

    let out = run(d, &["vset", "count", "--omega", "2-chain", "--rank", "2", "--format", "json"]);
    assert_eq!(json(&out)["counts"], serde_json::json!(["1", "3", "27"]));
    let out = run(d, &["vset", "build", "--omega", "mo2", "--rank", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("\"rank\": 1").count(), 6);
    assert_eq!(code(&run(d, &["vset", "build", "--omega", "2-chain", "--rank", "3"])), 2);
    let out = run(d, &["vset", "count", "--omega", "mo2", "--rank", "3"]);
    assert!(stdout(&out).contains("digits"));
}

#[test]
fn logic_commands() {
    let dir = workspace();
    let d = dir.path();
    let schema = "P(x) & (P(x)' | (P(x) & Q(x))) |- Q(x)";
    let out = run(d, &["logic", "check", "--model", "o6model.json", schema, "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["witness"]["lhs"], "b");
    assert_eq!(v["witness"]["rhs"], "a");
    assert_eq!(code(&run(d, &["logic", "check", "--model", "mo2model.json", schema])), 0);

    let out = run(d, &["logic", "check", "--model", "o6model.json", "P(x |-"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 4"));
    let out = run(d, &["logic", "check", "--model", "o6model.json", "P(x, x) |- top"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("type error"));
    assert_eq!(code(&run(d, &["logic", "check", "--omega", "mo2", "P |- P"])), 2);

    assert_eq!(code(&run(d, &["logic", "soundness", "--omega", "mo2", "--samples", "200"])), 0);
    let out = run(d, &["logic", "soundness", "--omega", "mo2", "--rules", "classical"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).matches("FAIL").count(), 2);
    let out = run(
        d,
        &["logic", "soundness", "--omega", "mo2", "--rules", "classical", "--rule", "frobenius", "--exhaustive", "--format", "json"],
    );
    let w = &json(&out)["checks"][0]["witness"];
    assert_eq!(w["instantiation"]["phi"]["(x1,(x1,*))"], "a");
    assert_eq!(w["instantiation"]["phi"]["(x2,(x1,*))"], "a'");
    assert_eq!(w["instantiation"]["psi"]["(x1,*)"], "b");
    assert_eq!(code(&run(d, &["logic", "soundness", "--omega", "mo2", "--rules", "nope.json"])), 2);

    write(
        &dir,
        "rules.json",
        r#"{"name": "mine", "rules": [{"name": "swap", "predicates": {"phi": ["S"], "psi": ["S"]},
            "premises": ["y:S ; phi(y) & psi(y) |- bot"], "conclusion": "y:S ; psi(y) & phi(y) |- bot"}]}"#,
    );
    assert_eq!(code(&run(d, &["logic", "soundness", "--omega", "o6", "--rules", "rules.json", "--exhaustive"])), 0);
}

#[test]
fn countermodels() {
    let dir = workspace();
    let d = dir.path();
    let out = run(d, &["logic", "countermodel", "P & (Q | R) |- (P & Q) | (P & R)", "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["model"], "mo2");
    assert_eq!(code(&run(d, &["logic", "countermodel", "P(x) |- P(x)"])), 0);
    let schema = "P(x) & (P(x)' | (P(x) & Q(x))) |- Q(x)";
    assert_eq!(code(&run(d, &["logic", "countermodel", "--omega", "mo2", schema])), 0);
    assert_eq!(code(&run(d, &["logic", "countermodel", "--omega", "o6", schema])), 1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = workspace();
    let d = dir.path();
    let invocations: [&[&str]; 4] = [
        &["logic", "soundness", "--omega", "mo2", "--rules", "classical", "--seed", "11", "--format", "json"],
        &["logic", "soundness", "--omega", "boolean(2)", "--samples", "100", "--seed", "3", "--format", "json"],
        &["topos", "build", "--omega", "2-chain", "--check", "--composition", "--format", "json"],
        &["laws", "frobenius", "--omega", "mo2", "--sizes", "2,1", "--format", "json"],
    ];
    for args in invocations {
        let a = run(d, args);
        let b = run(d, args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn usage_errors() {
    let dir = workspace();
    let d = dir.path();
    assert_eq!(code(&run(d, &["bogus"])), 2);
    assert_eq!(code(&run(d, &["laws"])), 2);
    assert_eq!(code(&run(d, &["laws", "frobenius", "--sizes", "2,1"])), 2);
    assert_eq!(code(&run(d, &["laws", "frobenius", "--omega", "mo2", "--sizes", "x"])), 2);
    assert_eq!(code(&run(d, &["logic", "check", "--model", "missing.json", "top |- top"])), 2);
    assert_eq!(code(&run(d, &["topos", "build", "--omega", "mo2", "--format", "yaml"])), 2);
}
