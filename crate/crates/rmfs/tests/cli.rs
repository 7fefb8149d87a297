use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rmfs::fixtures::random_state;
use rmfs::model::state_to_json;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn rmfs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmfs")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn objective(o: &Output) -> i64 {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["objective_value"].as_i64().unwrap()
}

#[test]
fn example1_split_and_integrated() {
    let state = fixture("example1_state.json");
    let split = rmfs(&["solve", "--state", state.to_str().unwrap(), "--variant", "split"]);
    assert_eq!(code(&split), 0);
    assert_eq!(objective(&split), 2);
    let whole = rmfs(&["solve", "--state", state.to_str().unwrap(), "--variant", "integrated"]);
    assert_eq!(objective(&whole), 4);
}

#[test]
fn oracle_agrees_on_random_tiny_states() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let path = dir.path().join(format!("s{seed}.json"));
        std::fs::write(&path, state_to_json(&random_state(seed, 4, 6, 2))).unwrap();
        for variant in ["integrated", "split_stations", "split_time"] {
            let o = rmfs(&["solve", "--state", path.to_str().unwrap(), "--variant", variant, "--oracle"]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            assert!(String::from_utf8_lossy(&o.stderr).contains("oracle agrees"));
        }
    }
}

#[test]
fn exit_codes() {
    let state = fixture("example1_state.json");
    let s = state.to_str().unwrap();
    assert_eq!(code(&rmfs(&["solve", "--state", s, "--variant", "split", "--expect", "3"])), 3);
    assert_eq!(code(&rmfs(&["solve", "--state", s, "--variant", "split", "--expect", "2"])), 0);
    assert_eq!(code(&rmfs(&["solve", "--state", s, "--variant", "sideways"])), 1);
    assert_eq!(code(&rmfs(&["gen", "--orders", "5", "--skus", "5", "--pods", "5", "--alpha", "0"])), 1);
    assert_eq!(code(&rmfs(&["frobnicate"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, std::fs::read_to_string(&state).unwrap().replace("rmfs.state/1", "rmfs.state/7")).unwrap();
    assert_eq!(code(&rmfs(&["solve", "--state", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&rmfs(&["gen", "--orders", "5", "--skus", "100", "--pods", "5", "--alpha", "2"])), 2);
}

#[test]
fn gen_is_reproducible_and_lp_export_works() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let args = ["gen", "--orders", "50", "--skus", "20", "--pods", "50", "--alpha", "2", "--seed", "1", "--out"];
        let o = rmfs(&[&args[..], &[p.to_str().unwrap()]].concat());
        assert_eq!(code(&o), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.contains("rmfs.instance/1"));

    let lp = dir.path().join("m.lp");
    let state = fixture("example2_state.json");
    let o = rmfs(&["solve", "--state", state.to_str().unwrap(), "--lp", lp.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let model = std::fs::read_to_string(&lp).unwrap();
    assert!(model.starts_with("\\ integrated") && model.contains("Subject To") && model.trim_end().ends_with("End"));
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    let trace = dir.path().join("t.tsv");
    let make = ["gen", "--orders", "6", "--skus", "8", "--pods", "10", "--alpha", "2", "--layout", "desk", "--out"];
    assert_eq!(code(&rmfs(&[&make[..], &[inst.to_str().unwrap()]].concat())), 0);
    let o = rmfs(&["simulate", "--instance", inst.to_str().unwrap(), "--policy", "split_stations", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("visits"));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("time\tkind\tentity\tdetail\n"));
}

fn tiny_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"schema": "rmfs.experiment/1",
            "instances": [{"num_orders": 6, "num_skus": 8, "num_pods": 10, "skus_per_pod": 2}],
            "methods": ["sequential", "split_stations"],
            "repetitions": 2}"#,
    )
    .unwrap();
    path
}

#[test]
fn experiment_rows_normalization_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out = dir.path().join("r.csv");
    let o = rmfs(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rmfs::harness::read_rows(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows.iter().filter(|r| r.method == rmfs::sim::Policy::Sequential) {
        assert_eq!(r.psv_rel, Some(1.0));
        assert_eq!(r.distance_rel, Some(1.0));
    }
    assert!(rows.iter().all(|r| r.turnover_backlog.is_some() && r.turnover_station.is_some()));
    assert!(dir.path().join("r.csv.timing.csv").exists());

    let rep = rmfs(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    let table = String::from_utf8_lossy(&rep.stdout);
    assert!(table.contains("turnover_backlog") && table.contains("split_stations"));
    let plot = std::fs::read_to_string(dir.path().join("r.csv.plot.csv")).unwrap();
    assert!(plot.starts_with("instance,method,prefilter,metric,runs,failed,mean,std,ratio"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n").unwrap();
    assert_ne!(code(&rmfs(&["report", bad.to_str().unwrap()])), 0);
}

#[test]
fn experiment_csv_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let mut outs = Vec::new();
    for (i, workers) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.csv"));
        let o = Command::new(env!("CARGO_BIN_EXE_rmfs"))
            .args(["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--prefilter", "3"])
            .env("RMFS_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}
