use std::path::Path;
use std::process::{Command, Output};

fn minsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsurf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn central_passes_and_rejects_small_m() {
    let o = minsurf(&["central", "--m", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&minsurf(&["central", "--m", "1"])), 2);
    assert_eq!(code(&minsurf(&["central", "--m", "25"])), 2);
}

#[test]
fn central_mesh_has_both_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("graphs.obj");
    let o = minsurf(&["central", "--m", "3", "--grid", "8", "--mesh", obj.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2 * 8 * 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), 2);
    let csv = std::fs::read_to_string(obj.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 8 * 8);
}

#[test]
fn tower_minimal_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tower.csv");
    let o = minsurf(&["tower", "--schedule", "minimal", "--steps", "10", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let row5: Vec<&str> = text.lines().find(|l| l.starts_with("5,")).unwrap().split(',').collect();
    assert_eq!(row5[1], "9");
    assert_eq!(row5[2], "35/16");
    assert_eq!(row5[3].parse::<f64>().unwrap(), 2.1875);
    assert!(String::from_utf8_lossy(&o.stdout).contains("divergent"));
}

#[test]
fn tower_rejects_bad_schedule() {
    let o = minsurf(&["tower", "--schedule", "3,4"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("index 3"));
    assert_eq!(code(&minsurf(&["tower", "--schedule", "geometric:x"])), 2);
}

#[test]
fn tower_geometric_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = minsurf(&["--json", out.to_str().unwrap(), "tower", "--schedule", "geometric:2", "--steps", "20"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&out)["data"]["series"], "convergent");
}

#[test]
fn hurwitz_checks() {
    assert_eq!(code(&minsurf(&["hurwitz", "--t", "0.01"])), 0);
    assert_eq!(code(&minsurf(&["hurwitz", "--t", "0"])), 2);
    assert_eq!(code(&minsurf(&["hurwitz", "--t", "0.7"])), 2);
}

#[test]
fn deterministic_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = minsurf(&["--deterministic", "--json", p.to_str().unwrap(), "central", "--m", "4"]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["seconds"], 0.0);
    assert_eq!(v["config"]["m"], 4);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# tower run\nschedule = minimal\nsteps = 12\n").unwrap();
    let out = dir.path().join("r.json");
    let o = minsurf(&["--config", cfg.to_str().unwrap(), "--json", out.to_str().unwrap(), "tower", "--steps", "9"]);
    assert_eq!(code(&o), 0);
    let v = json(&out);
    assert_eq!(v["config"]["schedule"], "minimal");
    assert_eq!(v["config"]["steps"], 9);
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(code(&minsurf(&["--config", cfg.to_str().unwrap(), "hurwitz"])), 2);
}

#[test]
fn lemma1_reports_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = minsurf(&["--json", out.to_str().unwrap(), "lemma1", "--m", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&minsurf(&["lemma1", "--m", "9"])), 2);
}

#[test]
fn figure_writes_three_objects() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("fig.obj");
    let o = minsurf(&["figure", "--grid", "6", "--out", obj.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), 3);
}
