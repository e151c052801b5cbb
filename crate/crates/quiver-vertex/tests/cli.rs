use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qvertex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvertex"))
        .args(args)
        .env_remove("QVERTEX_SEED")
        .output()
        .expect("run qvertex")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const A3: &str = r#"{
  "vertices": ["1", "2", "3"],
  "arrows": [["1", "2"], ["2", "3"]],
  "v": {"1": 1, "2": 2, "3": 1},
  "w": {"2": 1}
}"#;

#[test]
fn version_carries_build_hash() {
    let o = qvertex(&["--version"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains('+'), "{}", stdout(&o));
}

#[test]
fn theory_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "a3.json", A3);
    for cmd in ["dim", "pairings", "tangent"] {
        let a = qvertex(&[cmd, "--theory", &t]);
        let b = qvertex(&[cmd, "--builtin", "a3"]);
        assert!(
            a.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert!(stdout(&b).starts_with(&stdout(&a)), "{cmd}");
    }
    let q = qvertex(&["roots", "--quiver", &t, "--height", "2"]);
    assert_eq!(stdout(&q).lines().count(), 5);
}

#[test]
fn jobs_do_not_change_output() {
    let one = qvertex(&[
        "vertex",
        "--builtin",
        "d4",
        "--order",
        "4",
        "--normalized",
        "--jobs",
        "1",
    ]);
    let many = qvertex(&[
        "vertex",
        "--builtin",
        "d4",
        "--order",
        "4",
        "--normalized",
        "--jobs",
        "4",
    ]);
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&many));
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qvertex"));
        c.args(["vertex", "--builtin", "gr22", "--order", "1"])
            .args(extra);
        match env {
            Some(s) => c.env("QVERTEX_SEED", s),
            None => c.env_remove("QVERTEX_SEED"),
        };
        stdout(&c.output().unwrap())
    };
    assert_eq!(run(Some("9"), &[]), run(None, &["--seed", "9"]));
    assert_ne!(run(Some("9"), &[]), run(None, &[]));
}

#[test]
fn sum_point_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = qvertex(&["slantsum", "--builtin", "d4", "--format", "json"]);
    assert!(o.status.success());
    let p = write(dir.path(), "d4.json", &stdout(&o));
    let a = qvertex(&["vertex", "--point", &p, "--order", "3", "--normalized"]);
    let b = qvertex(&["vertex", "--builtin", "d4", "--order", "3", "--normalized"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn slant_sum_of_point_files() {
    use quiver_vertex::{catalog, io};
    let dir = tempfile::tempdir().unwrap();
    let dump = |p| serde_json::to_string(&io::point_to_value(&p)).unwrap();
    let p1 = write(dir.path(), "a3.json", &dump(catalog::a3_point()));
    let p2 = write(dir.path(), "gr22.json", &dump(catalog::gr22_point()));
    let sum = &["--point1", &p1, "--point2", &p2, "--star1", "2", "--star2", "1"];
    let o = qvertex(&[&["slantsum"][..], sum, &["--format", "json"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        stdout(&o),
        stdout(&qvertex(&["slantsum", "--builtin", "d4", "--format", "json"]))
    );
    let o = qvertex(
        &[
            &["check", "factorization"][..],
            sum,
            &["--order", "3", "--normalized"],
        ]
        .concat(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}{}",
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn check_appends_to_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.jsonl");
    let l = ledger.to_str().unwrap();
    for _ in 0..2 {
        let o = qvertex(&[
            "check",
            "conjecture",
            "--builtin",
            "a3",
            "--order",
            "3",
            "--ledger",
            l,
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let lines = fs::read_to_string(&ledger).unwrap();
    assert_eq!(lines.lines().count(), 2);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["report"]["status"], "pass");
}

#[test]
fn exit_codes() {
    let inconclusive = qvertex(&["check", "factorization", "--builtin", "flag3", "--order", "2"]);
    assert_eq!(inconclusive.status.code(), Some(2));
    let bad = qvertex(&["dim", "--theory", "/nonexistent/theory.json"]);
    assert_eq!(bad.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "bad.json",
        r#"{"vertices": ["1"], "v": {"1": 1}, "colour": 3}"#,
    );
    assert_eq!(qvertex(&["dim", "--theory", &t]).status.code(), Some(3));
    assert_eq!(qvertex(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn sweep_writes_one_entry_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        r#"{"checks": [
          {"check": "conjecture", "builtin": "a3", "order": 3},
          {"check": "conjecture", "builtin": "gr22", "order": 4},
          {"check": "factorization", "builtin": "gr22-m2", "variant": "q-equals-hbar", "order": 2},
          {"check": "dimcorpus", "count": 10}
        ]}"#,
    );
    let ledger = dir.path().join("l.jsonl");
    let o = qvertex(&[
        "sweep",
        "--config",
        &cfg,
        "--ledger",
        ledger.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}{}",
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(fs::read_to_string(&ledger).unwrap().lines().count(), 4);
}
