//! End-to-end tests of the `swapcluster` binary: every subcommand, the JSON
//! outputs, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swapcluster"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_line_fixture(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("line.cspec");
    let text = "\
clusterspec v1
metric euclidean 1
objective lq q=2 k=2
point 0
point 1
point 5
candidate 0
candidate 1
candidate 5
";
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn gen_solve_oracle_roundtrip() {
    let dir = tempdir();
    let instance = dir.join("cube.cspec");
    let out = run(&[
        "gen",
        "--kind",
        "uniform-cube",
        "--n",
        "9",
        "--d",
        "2",
        "--k",
        "2",
        "--seed",
        "7",
        "--out",
        instance.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&instance).unwrap();
    assert!(text.starts_with("clusterspec v1"));

    let solve = stdout_json(&run(&[
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--rho",
        "2",
    ]));
    let oracle = stdout_json(&run(&["oracle", "--instance", instance.to_str().unwrap()]));
    let cost = solve["final_cost"].as_f64().unwrap();
    let best = oracle["best_cost"].as_f64().unwrap();
    assert!(cost + 1e-9 >= best);
    assert!((cost - best).abs() <= 1e-9 * best.max(1.0), "rho=k is exact");
    assert!(solve["certified_local_opt"].as_bool().unwrap());
}

#[test]
fn solve_on_the_line_fixture_finds_cost_one() {
    let dir = tempdir();
    let path = write_line_fixture(&dir);
    let solve = stdout_json(&run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--rho",
        "2",
        "--trace",
    ]));
    assert_eq!(solve["final_cost"].as_f64().unwrap(), 1.0);
    assert!(solve["trace"].is_array());
}

#[test]
fn analyze_emits_all_report_sections() {
    let dir = tempdir();
    let path = write_line_fixture(&dir);
    let report = stdout_json(&run(&[
        "analyze",
        "--instance",
        path.to_str().unwrap(),
        "--epsilon",
        "0.3",
        "--trials",
        "200",
    ]));
    for section in [
        "filter",
        "partition_stats",
        "lemma_checks",
        "cut_frequencies",
        "accounting",
    ] {
        assert!(report.get(section).is_some(), "missing section {section}");
    }
    assert!(report["lemma_checks"]["all_ok"].as_bool().unwrap());
    assert_eq!(report["partition_stats"]["trials"].as_u64().unwrap(), 200);
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = tempdir();
    let config_path = dir.join("bench.json");
    let csv_path = dir.join("report.csv");
    let config = serde_json::json!({
        "seeds": { "start": 0, "count": 3 },
        "instances": [{
            "id": "cube",
            "generator": { "kind": "uniform-cube", "d": 2, "n": 7 },
            "objective": { "family": "lq", "q": 2.0, "k": 2 }
        }],
        "algorithms": [
            { "name": "local-search", "rho": 2 },
            { "name": "oracle" }
        ]
    });
    std::fs::write(&config_path, config.to_string()).unwrap();
    let report = stdout_json(&run(&[
        "bench",
        "--config",
        config_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(report["rows"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("instance,algorithm,seed"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn theory_rho_reports_the_reference_values() {
    let out = stdout_json(&run(&[
        "theory-rho",
        "--epsilon",
        "1.0",
        "--d",
        "1",
    ]));
    assert!((out["log10_rho"].as_f64().unwrap() - 3.9133).abs() < 1e-3);
    assert!(!out["o_form"].as_bool().unwrap());

    let lq = stdout_json(&run(&[
        "theory-rho",
        "--epsilon",
        "0.2",
        "--d",
        "2",
        "--variant",
        "lq",
        "--q",
        "3",
    ]));
    assert!(lq["o_form"].as_bool().unwrap());
}

#[test]
fn validation_failures_exit_with_code_two() {
    // missing file
    let out = run(&["solve", "--instance", "/nonexistent.cspec"]);
    assert_eq!(out.status.code(), Some(2));

    // invariant violation inside the file
    let dir = tempdir();
    let bad = dir.join("bad.cspec");
    std::fs::write(
        &bad,
        "clusterspec v1\nmetric matrix 2\nobjective ufl\npoint idx=0\ncandidate idx=1\nmatrixrow 0 3\nmatrixrow 4 0\n",
    )
    .unwrap();
    let out = run(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("metric not symmetric"));

    // bad epsilon for analyze
    let fixture = write_line_fixture(&dir);
    let out = run(&[
        "analyze",
        "--instance",
        fixture.to_str().unwrap(),
        "--epsilon",
        "1.5",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "swapcluster-cli-test-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
