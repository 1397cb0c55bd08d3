use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nimedge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nimedge"))
        .args(args)
        .current_dir(dir)
        .env("NIMEDGE_LEDGER", dir.join("ledger.jsonl"))
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn construct_then_verify_p2k() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let built = json(&nimedge(
        d,
        &[
            "construct",
            "--family",
            "p2k",
            "--k",
            "2",
            "--n",
            "13",
            "-o",
            "c.json",
        ],
    ));
    assert_eq!(built["layout"], "c.json.layout.json");
    let report = json(&nimedge(
        d,
        &["verify", "--coloring", "c.json", "--pattern", "path:4"],
    ));
    assert_eq!(report["count"], 39);
    assert_eq!(
        report["per_color_breakdown"],
        serde_json::json!([12, 12, 12, 3])
    );

    let anchored = json(&nimedge(
        d,
        &[
            "verify",
            "--coloring",
            "c.json",
            "--pattern",
            "path:4",
            "--anchored",
        ],
    ));
    assert_eq!(anchored, report);

    let layout = json(&nimedge(d, &["verify", "--layout", "c.json.layout.json"]));
    assert_eq!(layout["ok"], true);
}

#[test]
fn emitted_colorings_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let c = nimedge(
        d,
        &[
            "construct",
            "--family",
            "overlay",
            "--pattern",
            "path:4",
            "--n",
            "9",
        ],
    );
    std::fs::write(d.join("o.json"), &c.stdout).unwrap();
    let first = json(&nimedge(
        d,
        &["verify", "--coloring", "o.json", "--pattern", "path:4"],
    ));
    let again = nimedge(
        d,
        &[
            "construct",
            "--family",
            "overlay",
            "--pattern",
            "path:4",
            "--n",
            "9",
            "-o",
            "p.json",
        ],
    );
    json(&again);
    let second = json(&nimedge(
        d,
        &["verify", "--coloring", "p.json", "--pattern", "path:4"],
    ));
    assert_eq!(first, second);
    assert!(first["count"].as_u64().unwrap() >= 9);
}

#[test]
fn turan_formula_value() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&nimedge(
        dir.path(),
        &["turan", "--pattern", "path:4", "--n", "13"],
    ));
    assert_eq!(v["value"], 12);
    assert_eq!(v["method"], "faudree_schelp");
    let v = json(&nimedge(
        dir.path(),
        &[
            "turan",
            "--pattern",
            "star:3",
            "--n",
            "6",
            "--method",
            "oracle",
        ],
    ));
    assert_eq!(v["value"], 6);
}

#[test]
fn malformed_coloring_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let colors = vec!["0"; 77].join(",");
    std::fs::write(
        d.join("bad.json"),
        format!("{{\"n\":13,\"k\":2,\"colors\":[{colors}]}}"),
    )
    .unwrap();
    let out = nimedge(
        d,
        &["verify", "--coloring", "bad.json", "--pattern", "path:4"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colors length 77 != 78"));

    std::fs::write(d.join("big.json"), r#"{"n":3,"k":2,"colors":[0,2,1]}"#).unwrap();
    let out = nimedge(
        d,
        &["verify", "--coloring", "big.json", "--pattern", "path:3"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colors[1] = 2 >= k = 2"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        &["frobnicate"][..],
        &["turan", "--pattern", "path:", "--n", "4"],
        &["construct", "--family", "p2k", "--n", "13"],
        &["dot"],
    ] {
        let out = nimedge(d, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error"));
    }
}

#[test]
fn search_records_and_report_totals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = json(&nimedge(
        d,
        &[
            "search",
            "--pattern",
            "path:3",
            "--n",
            "5",
            "--k",
            "2",
            "--mode",
            "exhaustive",
        ],
    ));
    assert_eq!(r["best_count"], 2);
    assert_eq!(r["turan_comparison"]["gap"], 0);
    let hill = [
        "search",
        "--pattern",
        "path:4",
        "--n",
        "7",
        "--k",
        "2",
        "--mode",
        "hill",
        "--restarts",
        "3",
        "--seed",
        "5",
    ];
    let a = json(&nimedge(d, &hill));
    let b = json(&nimedge(d, &hill));
    assert_eq!(a["witness"], b["witness"]);
    assert_eq!(a["colorings_examined"], b["colorings_examined"]);
    json(&nimedge(d, &["turan", "--pattern", "path:5", "--n", "8"]));

    let report = json(&nimedge(d, &["report"]));
    assert_eq!(report["total_records"], 4);
    assert_eq!(report["by_command"]["search"], 3);
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    let csv = nimedge(d, &["report", "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&csv.stdout).lines().count(), 4);
    let table = nimedge(d, &["report", "--format", "table"]);
    assert!(String::from_utf8_lossy(&table.stdout).contains("records: 4 (search=3, turan=1)"));
}

#[test]
fn no_ledger_flag_and_exhaustive_budget() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = nimedge(
        d,
        &[
            "--no-ledger",
            "search",
            "--pattern",
            "path:3",
            "--n",
            "8",
            "--k",
            "2",
            "--mode",
            "exhaustive",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hill"));
    assert!(!d.join("ledger.jsonl").exists());
}

#[test]
fn pattern_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = json(&nimedge(d, &["pattern", "dstar:3+path:6"]));
    assert_eq!(p["tails"], serde_json::json!([[8, 7, 6], [9, 10, 11]]));
    assert_eq!(p["has_perfect_matching"], false);
    let out = nimedge(d, &["dot", "--pattern", "path:3"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("1 -- 2;"));
    json(&nimedge(
        d,
        &[
            "construct",
            "--family",
            "tail",
            "--pattern",
            "dstar:3+path:6",
            "--n",
            "20",
            "-o",
            "t.json",
        ],
    ));
    let out = nimedge(d, &["dot", "--coloring", "t.json", "--color", "0"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).matches("--").count(),
        75
    );
}
