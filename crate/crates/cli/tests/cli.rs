use std::path::Path;
use std::process::{Command, Output};

fn maltsev(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maltsev"))
        .args(args)
        .current_dir(dir)
        .env("MALTSEV_CACHE", dir.join("cache"))
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn construct_validate_show() {
    let dir = tempfile::tempdir().unwrap();
    let o = maltsev(dir.path(), &["construct", "--recipe", "bak", "--base", "chain:4", "--n", "4", "--out", "bak.json"]);
    assert_eq!(code(&o), 0);
    let o = maltsev(dir.path(), &["alg", "validate", "bak.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("size 4; t1/3, t2/3, t3/3"));
    let o = maltsev(dir.path(), &["alg", "show", "bak.json"]);
    assert!(stdout(&o).starts_with("C4^r4 (size 4)"));
}

#[test]
fn bad_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cut.json"), r#"{"name": "x", "size": 2, "operations": [{"name""#).unwrap();
    assert_eq!(code(&maltsev(dir.path(), &["alg", "validate", "cut.json"])), 2);
    std::fs::write(
        dir.path().join("extra.json"),
        r#"{"name": "m", "size": 1, "colour": "red", "operations": [{"name": "f", "arity": 1, "table": [0]}]}"#,
    )
    .unwrap();
    let o = maltsev(dir.path(), &["alg", "validate", "extra.json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring unknown field colour"));
}

#[test]
fn levels_of_majority_variety() {
    let dir = tempfile::tempdir().unwrap();
    let o = maltsev(dir.path(), &["levels", "--preset", "a:2", "--families", "jonsson,alvin,modular,reversed-modular", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (f, want) in [("jonsson", 2), ("alvin", 3), ("modular", 3), ("reversed-modular", 4)] {
        assert_eq!(v["levels"][f]["status"], "exact", "{f}");
        assert_eq!(v["levels"][f]["value"], want, "{f}");
    }
    // second run reads the cache and agrees
    let again = maltsev(dir.path(), &["levels", "--preset", "a:2", "--families", "jonsson,alvin,modular,reversed-modular", "--json"]);
    assert_eq!(stdout(&o), stdout(&again));
    assert!(dir.path().join("cache").read_dir().unwrap().next().is_some());
}

#[test]
fn verify_and_transform_chains() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&maltsev(p, &["construct", "--recipe", "preset:a", "--n", "2", "--out", "va2"])), 0);
    std::fs::write(p.join("maj.json"), r#"{"condition": "jonsson", "terms": ["x", "t1(x,y,z)", "z"]}"#).unwrap();
    std::fs::write(p.join("bad.json"), r#"{"condition": "alvin", "terms": ["x", "t1(x,y,z)", "z"]}"#).unwrap();
    assert_eq!(code(&maltsev(p, &["verify", "maj.json", "va2/g1.json"])), 0);
    let o = maltsev(p, &["verify", "bad.json", "va2/g1.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("fails"));
    let o = maltsev(p, &["transform", "--rule", "day_from_jonsson", "maj.json", "va2/g1.json", "--out", "day.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&maltsev(p, &["verify", "day.json", "va2/g1.json"])), 0);
    assert_eq!(code(&maltsev(p, &["transform", "--rule", "rday_from_alvin", "maj.json"])), 2);
}

#[test]
fn instances_check_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&maltsev(p, &["construct", "--recipe", "instance:baker-plus-2", "--out", "bp"])), 0);
    let o = maltsev(p, &["check", "--instance", "bp"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Fails"));
    let o = maltsev(p, &["search", "bp/algebra.json", "--identity", "a(b o g) <= a(g o b) o a(g o b)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample at"));
    let o = maltsev(p, &["check", "--algebra", "bp/algebra.json", "--identity", "a(a o a) <= a", "--bind", "a=0,1"]);
    assert_eq!(code(&o), 0);
    let o = maltsev(p, &["check", "--algebra", "bp/algebra.json", "--identity", "a(b o g) <= a"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reproduce_exit_codes_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&maltsev(p, &["reproduce", "polin"])), 0);
    assert_eq!(code(&maltsev(p, &["reproduce", "sumup-row:a:6"])), 2);
    assert_eq!(code(&maltsev(p, &["reproduce", "buh-witness:b:8"])), 2);
    assert_eq!(code(&maltsev(p, &["reproduce", "nonsense"])), 2);
    for target in ["sumup-row:a:2", "baker-plus"] {
        let one = maltsev(p, &["--threads", "1", "--no-cache", "reproduce", target, "--json"]);
        let four = maltsev(p, &["--threads", "4", "reproduce", target, "--json"]);
        assert_eq!(code(&one), 0, "{target}");
        assert_eq!(one.stdout, four.stdout, "{target}");
    }
}
