use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cubesplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubesplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

const SAMPLE: &str = "explicit:4,3,2;3,3,3;1,4,3";

#[test]
fn run_reports_units_and_counts() {
    let v = json(&cubesplit(&[
        "run", "--n", "3", "--m", "4", "--oracle", SAMPLE,
    ]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["algorithm"]["name"], "alg1");
    let units = v["result"]["lower_units"].as_array().unwrap();
    assert_eq!(units.len(), 3);
    let q = v["result"]["query_count"].as_u64().unwrap();
    assert!(q <= 97);
    assert_eq!(v["bounds"]["hansel_total_bound"], 97);
}

#[test]
fn alg2_uses_fewer_cells() {
    let v = json(&cubesplit(&[
        "run",
        "--n",
        "3",
        "--m",
        "4",
        "--oracle",
        SAMPLE,
        "--algorithm",
        "alg2",
        "--resource",
        "two-level",
    ]));
    assert_eq!(v["algorithm"]["resource"], "two-level");
    assert_eq!(v["result"]["split_cells"], 12);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "n = 2\nm = 9\nalgorithm = \"alg1\"\nseed = 5\n\n[oracle]\nkind = \"random\"\ndensity = 0.4\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = json(&cubesplit(&["run", "--config", cfg]));
    assert_eq!(a["grid"]["m"], 9);
    let b = json(&cubesplit(&[
        "run",
        "--config",
        cfg,
        "--algorithm",
        "brute",
    ]));
    assert_eq!(b["algorithm"]["name"], "brute");
    assert_eq!(a["result"]["lower_units"], b["result"]["lower_units"]);
}

#[test]
fn oracle_from_toml_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.toml");
    fs::write(
        &path,
        "kind = \"threshold\"\nweights = [\"1\", \"2\"]\ntheta = \"7/2\"\n",
    )
    .unwrap();
    let v = json(&cubesplit(&[
        "run",
        "--n",
        "2",
        "--m",
        "3",
        "--oracle",
        path.to_str().unwrap(),
    ]));
    let units: Vec<Vec<u64>> = serde_json::from_value(v["result"]["lower_units"].clone()).unwrap();
    assert_eq!(units, vec![vec![0, 2], vec![2, 1]]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = cubesplit(&[
        "run",
        "--n",
        "2",
        "--m",
        "2",
        "--oracle",
        "one",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["lower_units"], serde_json::json!([[0, 0]]));
}

#[test]
fn compare_agrees_across_algorithms() {
    let o = cubesplit(&[
        "compare",
        "--n",
        "4",
        "--m",
        "3",
        "--oracle",
        "random:0.5:11",
        "--algorithms",
        "alg1,alg2,complement,brute",
    ]);
    let v = json(&o);
    let rows = v["summary"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let table = String::from_utf8_lossy(&o.stderr);
    assert!(table.contains("alg1") && table.contains("brute"));
}

#[test]
fn workers_do_not_change_result() {
    let base = [
        "run",
        "--n",
        "3",
        "--m",
        "4",
        "--oracle",
        "random:0.5:3",
        "--algorithm",
        "alg1",
    ];
    let mut one = json(&cubesplit(&[&base[..], &["--workers", "1"]].concat()));
    let mut eight = json(&cubesplit(&[&base[..], &["--workers", "8"]].concat()));
    one.as_object_mut().unwrap().remove("perf");
    eight.as_object_mut().unwrap().remove("perf");
    assert_eq!(one, eight);
}

#[test]
fn bounds_and_worked_examples() {
    let v = json(&cubesplit(&["bounds", "--n", "3", "--m", "4"]));
    assert_eq!(v["middle_layer"], 19);
    assert_eq!(v["next_layer"], 18);
    assert_eq!(v["alekseev_bound"], 55);
    assert_eq!(v["upper_area_alekseev_bound"], 13);
    let w = json(&cubesplit(&["worked-examples"]));
    assert!(w.get("chain_transfer").is_some());
}

#[test]
fn exit_codes() {
    assert_eq!(
        cubesplit(&["run", "--n", "0", "--m", "4", "--oracle", "zero"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cubesplit(&["run", "--n", "2", "--m", "4", "--oracle", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cubesplit(&["run", "--m", "4", "--oracle", "zero"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cubesplit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        cubesplit(&["run", "--n", "2", "--m", "4", "--oracle", "explicit:1,2,3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cubesplit(&[
            "compare",
            "--n",
            "2",
            "--m",
            "4",
            "--oracle",
            "zero",
            "--algorithms",
            "alg1"
        ])
        .status
        .code(),
        Some(2)
    );
}
