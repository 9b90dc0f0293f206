use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hmconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmconv")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn disk(dir: &Path, name: &str, r: f64) -> PathBuf {
    write(dir, name, &format!(r#"{{"ambient": {{"center": [0, 0], "radius": {r}}}}}"#))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_then_w1() {
    let dir = TempDir::new().unwrap();
    let dom = disk(dir.path(), "disk.json", 1.0);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let o = hmconv(&["sample", s(&dom), "--w", "0.2,-0.1", "--samples", "2000", "--seed", seed, "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with("atoms 2000 total_weight 1"));
    }

    let same = hmconv(&["w1", s(&a), s(&a)]);
    assert_eq!(code(&same), 0);
    assert_eq!(stdout(&same).trim().parse::<f64>().unwrap(), 0.0);

    let plan = dir.path().join("plan.csv");
    let o = hmconv(&["w1", s(&a), s(&b), "--atoms", "256", "--plan", s(&plan)]);
    assert_eq!(code(&o), 0);
    let cost: f64 = stdout(&o).trim().parse().unwrap();
    assert!(cost > 0.0 && cost < 0.2, "{cost}");
    let rows = fs::read_to_string(&plan).unwrap();
    assert!(rows.starts_with("source_idx,target_idx,mass"));
    assert_eq!(rows.lines().count(), 257);

    let strict = hmconv(&["w1", s(&a), s(&b), "--atoms", "256", "--tolerance", "1e-9"]);
    assert_eq!(code(&strict), 2);
}

#[test]
fn interior_verdicts_set_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let limit = disk(dir.path(), "limit.json", 1.0);
    let members: Vec<PathBuf> = (2..=8)
        .map(|n| disk(dir.path(), &format!("m{n}.json"), 1.0 - 1.0 / n as f64))
        .collect();
    let region = dir.path().join("region.csv");
    let mut args = vec!["interior", "--limit", s(&limit), "--w", "0,0", "--epsilon", "0.3", "--region", s(&region)];
    args.extend(members.iter().map(|p| s(p)));
    let o = hmconv(&args);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("ok true"));
    assert!(region.exists());

    let half = disk(dir.path(), "half.json", 0.5);
    let o = hmconv(&["interior", "--limit", s(&limit), "--w", "0,0", "--epsilon", "0.1", s(&half)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("ok false"));
}

#[test]
fn perfectness_separates_connected_and_split_sets() {
    let dir = TempDir::new().unwrap();
    let segment = write(
        dir.path(),
        "segment.json",
        r#"{"ambient": {"center": [0, 0], "radius": 1},
            "obstacles": [{"type": "segment", "a": [-0.5, 0], "b": [0.5, 0]}]}"#,
    );
    assert_eq!(code(&hmconv(&["perfectness", s(&segment)])), 0);

    let pair = write(
        dir.path(),
        "pair.json",
        r#"{"ambient": {"center": [0, 0], "radius": 1},
            "obstacles": [{"type": "disk", "center": [-0.5, 0], "radius": 1e-9},
                          {"type": "disk", "center": [0.5, 0], "radius": 1e-9}]}"#,
    );
    let o = hmconv(&["perfectness", s(&pair)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("pass false"));
}

#[test]
fn beurling_and_regularity_report_their_estimates() {
    let dir = TempDir::new().unwrap();
    let set = write(
        dir.path(),
        "set.json",
        r#"{"ambient": {"center": [0, 0], "radius": 1},
            "obstacles": [{"type": "disk", "center": [0, 0.8], "radius": 0.05}]}"#,
    );
    let o = hmconv(&["beurling", s(&set), "--z", "0,0", "--samples", "20000"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("holds true"));

    let dom = disk(dir.path(), "disk.json", 1.0);
    let o = hmconv(&["regularity", s(&dom), "--tolerance", "0.2", "--samples", "2000"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("delta 0.2 epsilon "));
}

#[test]
fn scenario_gen_then_run() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("disks.json");
    let o = hmconv(&["scenario", "gen", "shrinking-disks", "--n-max", "8", "--out", s(&file)]);
    assert_eq!(code(&o), 0);

    let out = dir.path().join("report");
    let o = hmconv(&["scenario", "run", s(&file), "--checkers", "kernel", "--out-dir", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.starts_with("kernel,")));
    assert!(out.join("summary.txt").exists());
}

#[test]
fn errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let dom = disk(dir.path(), "disk.json", 1.0);
    let out = dir.path().join("m.csv");

    let missing = hmconv(&["sample", s(&dir.path().join("nope.json")), "--w", "0,0", "--out", s(&out)]);
    assert_eq!(code(&missing), 1);
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));

    let outside = hmconv(&["sample", s(&dom), "--w", "2,0", "--out", s(&out)]);
    assert_eq!(code(&outside), 1);

    hmconv(&["sample", s(&dom), "--w", "0,0", "--samples", "10", "--out", s(&out)]);
    let unknown = hmconv(&["w1", s(&out), s(&out), "--solver", "sinkhorn"]);
    assert_eq!(code(&unknown), 1);

    let unknown = hmconv(&["scenario", "gen", "spirals", "--out", s(&out)]);
    assert_eq!(code(&unknown), 1);
}
