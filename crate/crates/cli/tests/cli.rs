use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;
use std::time::Duration;

use randturn::mc::replay;
use randturn::{GameKind, GameSpec};
use randturn_cli::commands::selfplay::read_records;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_randturn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("randturn-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn json(args: &[&str]) -> Value {
    let out = run(&[args, &["--json"]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--L"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--game", "hex", "--L", "0"]).status.code(), Some(3));
    assert_eq!(run(&["scaling", "--sizes", "5,7"]).status.code(), Some(3));
    let out = run(&["solve", "--game", "hex", "--L", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 13"));
}

#[test]
fn solve_examples() {
    let v = json(&["solve", "--game", "hex", "--L", "3"]);
    assert_eq!(v["value"], "0");
    assert_eq!(v["mean_check"], "PASS");
    assert_eq!(v["command"], "solve");
    assert_eq!(v["invocation"][0], "solve");
    assert!(v["version"].is_string());

    let v = json(&["solve", "--game", "recursive-majority", "--h", "1"]);
    assert_eq!(v["expected_length"], "5/2");

    let v = json(&["solve", "--game", "andor", "--h", "2", "--p", "0.381966"]);
    let len = v["expected_length_float"].as_f64().unwrap();
    assert!((len - 2.618034).abs() < 1e-6, "{len}");

    let v = json(&["solve", "--game", "team-captains", "--n", "4", "--p", "1/3", "--seed", "5"]);
    assert_eq!(v["mean_check"], "PASS");
}

#[test]
fn selfplay_single_cell() {
    let dir = scratch("single");
    let out = run(&["selfplay", "--game", "hex", "--L", "1", "--games", "100", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let report = read_json(&dir.join("report.json"));
    let a = &report["aggregates"];
    assert_eq!(a["length"]["mean"], 1.0);
    assert_eq!(a["i_win_rate"]["mean"], a["i_toss_rate"]);
    let (records, marker) = read_records(&std::fs::read_to_string(dir.join("records.jsonl")).unwrap()).unwrap();
    assert_eq!(records.len(), 100);
    assert!(marker.is_none());
}

#[test]
fn records_replay_to_reported_winners() {
    let dir = scratch("replay");
    let args = ["selfplay", "--game", "hex", "--L", "4", "--games", "30", "--strategy-ii", "random", "--out"];
    assert!(run(&[&args[..], &[dir.to_str().unwrap()]].concat()).status.success());
    let (records, _) = read_records(&std::fs::read_to_string(dir.join("records.jsonl")).unwrap()).unwrap();
    let spec = Arc::new(GameSpec::without_precoloring(GameKind::Hex { rows: 4, cols: 4 }).unwrap());
    for r in &records {
        let outcome = replay(&spec, r).unwrap();
        assert_eq!(outcome.winner, r.winner);
        assert_eq!(outcome.determined_at_turn, Some(r.length));
    }
    let report = read_json(&dir.join("report.json"));
    let lengths: Vec<f64> = report["games"].as_array().unwrap().iter().map(|g| g["length"].as_f64().unwrap()).collect();
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    assert!((mean - report["aggregates"]["length"]["mean"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn mc_selfplay_is_fair_on_hex_11() {
    let v = json(&[
        "selfplay",
        "--game",
        "hex",
        "--L",
        "11",
        "--games",
        "1000",
        "--strategy-i",
        "mc:30",
        "--strategy-ii",
        "mc:30",
    ]);
    let w = &v["aggregates"]["i_win_rate"];
    let (mean, se) = (w["mean"].as_f64().unwrap(), w["stderr"].as_f64().unwrap());
    assert!((mean - 0.5).abs() <= 3.0 * se, "{mean} ± {se}");
}

#[test]
fn interrupt_leaves_a_marker() {
    let dir = scratch("interrupt");
    let mut child = bin()
        .args(["selfplay", "--game", "hex", "--L", "9", "--games", "100000", "--strategy-i", "mc:500"])
        .args(["--strategy-ii", "mc:500", "--out", dir.to_str().unwrap()])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let records = dir.join("records.jsonl");
    for _ in 0..600 {
        if std::fs::metadata(&records).map(|m| m.len() > 0).unwrap_or(false) {
            break;
        }
        std::thread::sleep(Duration::from_millis(100));
    }
    let killed = Command::new("kill").args(["-INT", &child.id().to_string()]).status().unwrap();
    assert!(killed.success());
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0));
    let (games, marker) = read_records(&std::fs::read_to_string(&records).unwrap()).unwrap();
    let marker = marker.expect("truncation marker");
    assert!(marker.truncated);
    assert_eq!(marker.completed, games.len());
    assert_eq!(marker.requested, 100_000);
    let report = read_json(&dir.join("report.json"));
    assert_eq!(report["truncated"], true);
    assert_eq!(report["aggregates"]["completed"], games.len());
}

#[test]
fn heatmap_files() {
    let dir = scratch("heatmap");
    let out = run(&["heatmap", "--game", "hex", "--L", "3", "--samples", "50000", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("heatmap.csv")).unwrap();
    assert!(csv.starts_with("row,col,value\n"));
    assert_eq!(csv.lines().count(), 10);
    let svg = std::fs::read_to_string(dir.join("heatmap.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 9);
    let h = read_json(&dir.join("heatmap.json"));
    assert_eq!(h["argmax"], 4);
    assert_eq!(h["exact_argmax"], serde_json::json!([4]));
    assert!(h["rotation_max_z"].as_f64().unwrap() < 4.5);
}

#[test]
fn scaling_fits_synthetic_lengths() {
    let dir = scratch("scaling");
    for (power, want) in [(1.5, 1.5), (2.0, 2.0)] {
        let input = dir.join(format!("p{power}.csv"));
        let mut text = String::from("L,mean_length\n");
        for l in [5, 7, 9, 11, 13] {
            text += &format!("{l},{}\n", (l as f64).powf(power));
        }
        std::fs::write(&input, text).unwrap();
        let v = json(&["scaling", "--input", input.to_str().unwrap()]);
        let slope = v["fit"]["slope"].as_f64().unwrap();
        assert!((slope - want).abs() < 1e-6, "{slope}");
    }
}

#[test]
fn tree_series_files() {
    let dir = scratch("tree");
    assert!(run(&["tree", "switching", "--h", "20", "--out", dir.to_str().unwrap()]).status.success());
    let series = std::fs::read_to_string(dir.join("series.csv")).unwrap();
    let last: Vec<&str> = series.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "20");
    assert!((last[1].parse::<f64>().unwrap() - 0.236068).abs() < 1e-5);

    assert!(run(&["tree", "andor", "--h", "4", "--simulate", "2", "--games", "20000", "--out", dir.to_str().unwrap()])
        .status
        .success());
    let fixed = std::fs::read_to_string(dir.join("fixed_points.csv")).unwrap();
    assert!(fixed.lines().any(|l| l == "0.381966"));
    let report = read_json(&dir.join("report.json"));
    let sim = &report["simulated"][0];
    let phi2 = ((1.0 + 5f64.sqrt()) / 2.0).powi(2);
    let (mean, se) = (sim["length"]["mean"].as_f64().unwrap(), sim["length"]["stderr"].as_f64().unwrap());
    assert!((mean - phi2).abs() <= 3.0 * se, "{mean} ± {se}");
}

#[test]
fn influence_report() {
    let v = json(&["influence", "--game", "andor", "--h", "2"]);
    let phi2 = ((1.0 + 5f64.sqrt()) / 2.0).powi(2);
    assert!((v["osss_bound"].as_f64().unwrap() - phi2).abs() < 1e-9);
    assert_eq!(v["bounds_hold"], true);
    let dir = scratch("influence");
    assert!(run(&["influence", "--game", "hex", "--L", "3", "--out", dir.to_str().unwrap()]).status.success());
    let csv = std::fs::read_to_string(dir.join("influence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
}
