use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordapprox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", path_str(&fixture("two_chain/poset.json"))]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("2 elements, 3 related pairs"));

    let cyc = run(&["validate", path_str(&fixture("cycle.json"))]);
    assert_eq!(cyc.status.code(), Some(1));
    assert!(
        stderr(&cyc).contains("0 -> 1 -> 2 -> 0"),
        "{}",
        stderr(&cyc)
    );

    let bad = run(&["validate", path_str(&fixture("malformed.json"))]);
    assert_eq!(bad.status.code(), Some(2));

    let missing = run(&["validate", "/nonexistent/poset.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn gen_upsets_writes_indicator_family() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "two_chain/poset.json",
            serde_json::json!([["1", "1"], ["0", "1"]]),
        ),
        (
            "antichain.json",
            serde_json::json!([["1", "0"], ["0", "1"]]),
        ),
        ("singleton.json", serde_json::json!([["1"]])),
    ];
    for (i, (poset, expected)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("fam{i}.json"));
        let o = run(&[
            "gen-upsets",
            path_str(&fixture(poset)),
            "-o",
            path_str(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(read(&out)["members"], *expected);

        // the written file is accepted back
        let chk = run(&["check-generates", path_str(&fixture(poset)), path_str(&out)]);
        assert_eq!(chk.status.code(), Some(0));
        assert_eq!(stdout(&chk).trim(), "true");
    }
}

#[test]
fn check_generates_reports_witness() {
    let poset = fixture("two_chain/poset.json");
    let o = run(&[
        "check-generates",
        path_str(&poset),
        path_str(&fixture("two_chain/constant_family.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("false"));
    assert!(out.contains("witness: 1 ⋠ 0"), "{out}");

    let empty = run(&[
        "check-generates",
        path_str(&poset),
        path_str(&fixture("two_chain/empty_family.json")),
    ]);
    assert_eq!(empty.status.code(), Some(1));
    assert!(stderr(&empty).contains("no members"));

    let labelled = run(&[
        "check-generates",
        path_str(&fixture("three_chain/poset.json")),
        path_str(&fixture("three_chain/family.json")),
    ]);
    assert_eq!(labelled.status.code(), Some(0));
}

#[test]
fn family_on_wrong_carrier_is_rejected() {
    let o = run(&[
        "check-generates",
        path_str(&fixture("three_chain/poset.json")),
        path_str(&fixture("two_chain/family.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("carrier mismatch"));
}

#[test]
fn separate_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let expr = dir.path().join("expr.json");
    let poset = fixture("two_chain/poset.json");
    let family = fixture("two_chain/family.json");
    let o = run(&[
        "separate",
        path_str(&poset),
        path_str(&family),
        "--zero-on",
        "0",
        "--one-on",
        "1",
        "-o",
        path_str(&expr),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("k = [1], l = 1"), "{out}");
    assert!(out.contains("  0\t0\n  1\t1\n"), "{out}");

    let r = run(&[
        "replay",
        path_str(&poset),
        path_str(&family),
        path_str(&expr),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert!(stdout(&r).contains("  0\t0\n  1\t1\n"));

    let trivial = run(&[
        "separate",
        path_str(&poset),
        path_str(&family),
        "--one-on",
        "1",
        "--provider",
        "smoothstep",
    ]);
    assert_eq!(trivial.status.code(), Some(0));
    assert!(stdout(&trivial).contains("  0\t1\n  1\t1\n"));

    let bad = run(&[
        "separate",
        path_str(&poset),
        path_str(&family),
        "--zero-on",
        "1",
        "--one-on",
        "0",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("precondition violated"));
}

#[test]
fn approximate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let poset = fixture("two_chain/poset.json");
    let family = fixture("two_chain/family.json");

    let report = dir.path().join("r1.json");
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&fixture("two_chain/target_3_7.json")),
        "--eps",
        "2",
        "-o",
        path_str(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read(&report);
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["error"], "0");
    assert_eq!(doc["F_values"], serde_json::json!(["3", "7"]));
    let r = run(&[
        "replay",
        path_str(&poset),
        path_str(&family),
        path_str(&report),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));

    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&fixture("two_chain/target_const.json")),
        "--eps",
        "1/100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("error = 0\n"));

    let report = dir.path().join("r3.json");
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&fixture("two_chain/target_0_1.json")),
        "--eps",
        "1/3",
        "--provider",
        "smoothstep",
        "-o",
        path_str(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read(&report);
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["bound"], "1/3");
    assert_eq!(doc["provider"], "smoothstep");
    let r = run(&[
        "replay",
        path_str(&poset),
        path_str(&family),
        path_str(&report),
    ]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn tampered_report_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let poset = fixture("three_chain/poset.json");
    let family = fixture("three_chain/family.json");
    let report = dir.path().join("r.json");
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&fixture("three_chain/target.json")),
        "--n",
        "2",
        "-o",
        path_str(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut doc = read(&report);
    doc["F_values"][1] = Value::from("1/3");
    std::fs::write(&report, doc.to_string()).unwrap();
    let r = run(&[
        "replay",
        path_str(&poset),
        path_str(&family),
        path_str(&report),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("element 1"), "{}", stderr(&r));
}

#[test]
fn approximate_argument_errors() {
    let poset = fixture("two_chain/poset.json");
    let family = fixture("two_chain/family.json");
    let target = fixture("two_chain/target_3_7.json");
    // neither --eps nor --n
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&target),
    ]);
    assert_eq!(o.status.code(), Some(2));
    // --n requires a normalized target
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&target),
        "--n",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not normalized"));
    let o = run(&[
        "approximate",
        path_str(&poset),
        path_str(&family),
        path_str(&target),
        "--eps",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_small_run() {
    let o = run(&[
        "verify",
        "--seed",
        "7",
        "--trials",
        "3",
        "--max-size",
        "6",
        "--n-list",
        "1,2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["trials_run"], 3);

    let single = run(&["verify", "--trials", "1", "--max-size", "1"]);
    assert_eq!(single.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(doc["max_observed_error_ratio"], "0");

    let bad = run(&["verify", "--n-list", "0"]);
    assert_eq!(bad.status.code(), Some(1));
}
