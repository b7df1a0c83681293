use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wallbounce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wallbounce"))
        .args(args)
        .env_remove("WALLBOUNCE_OUTPUT_ROOT")
        .output()
        .expect("spawn wallbounce")
}

fn run_into(config: &str, dir: &Path) -> Output {
    let out = wallbounce(&["run", config, "--output-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn series(dir: &Path, name: &str) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(dir.join(name)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("case.cfg");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn standard_run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into("standard", a.path());
    let out = wallbounce(&["--threads", "1", "run", "standard", "--output-dir", b.path().to_str().unwrap()]);
    assert!(out.status.success());
    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        if name.to_string_lossy().ends_with(".csv") {
            assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
        }
    }
}

#[test]
fn standard_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    run_into("standard", dir.path());
    let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(text.starts_with("t,norm,mean_x,dx,mean_p,dp,product\n"));
    assert!(!text.contains('\r'));

    let rows = series(dir.path(), "series.csv");
    assert_eq!(rows.len(), 101);
    let first = &rows[0];
    let last = rows.last().unwrap();
    assert_eq!(last[0], 2.0);
    assert!((first[4] - 10.0).abs() < 1e-6);
    assert!((last[4] + 10.0).abs() < 1e-2, "mean_p(2) = {}", last[4]);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let ratio = summary["compression_ratio"].as_f64().unwrap();
    assert!((ratio - 0.603).abs() < 0.01, "{ratio}");
    assert_eq!(summary["collision_time"].as_f64(), Some(1.0));
    assert!(summary["norm_drift"].as_f64().unwrap() < 1e-7);
    assert!(summary["mean_p_at_collision"].as_f64().unwrap() < 0.0);

    let x = fs::read_to_string(dir.path().join("snapshot_x_1.000.csv")).unwrap();
    assert!(x.starts_with("x,re,im,abs2\n"));
    let p = fs::read_to_string(dir.path().join("snapshot_p_2.000.csv")).unwrap();
    assert!(p.starts_with("p,re,im,abs2\n"));
}

fn peak(dir: &Path, name: &str) -> (f64, f64) {
    let rows = series(dir, name);
    let best = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    let spacing = rows[1][0] - rows[0][0];
    (best[0], spacing)
}

#[test]
fn figure_one_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    run_into("fig1_gaussian", dir.path());
    for t in [0.0, 0.5] {
        let (x, h) = peak(dir.path(), &format!("snapshot_x_{t:.3}.csv"));
        assert!((x - (-10.0 + 10.0 * t)).abs() <= h, "t = {t}: peak at {x}");
    }
    let (p_before, h) = peak(dir.path(), "snapshot_p_0.000.csv");
    assert!((p_before - 10.0).abs() <= h);
    let (p_after, h) = peak(dir.path(), "snapshot_p_2.000.csv");
    assert!((p_after + 10.0).abs() <= h);
    for row in series(dir.path(), "series.csv") {
        assert!((row[1] - 1.0).abs() < 1e-7);
    }
}

#[test]
fn figure_four_writes_free_reference() {
    let dir = tempfile::tempdir().unwrap();
    run_into("fig4_alpha_half", dir.path());
    let wall = series(dir.path(), "series.csv");
    let free = series(dir.path(), "series_free.csv");
    assert_eq!(wall.len(), free.len());
    let last = free.last().unwrap();
    assert!((last[2] - 10.0).abs() < 1e-6, "free <x>(2) = {}", last[2]);
    assert!(wall.last().unwrap()[4] < -9.9);
}

#[test]
fn jsonl_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "times.start = 0\ntimes.stop = 0.2\ntimes.step = 0.1\ntimes.snapshots = 0.1\n",
    );
    let out_dir = dir.path().join("out");
    let out = wallbounce(&["run", &cfg, "--format", "jsonl", "--output-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(out_dir.join("series.jsonl")).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["product"].as_f64().is_some());
    let snap = fs::read_to_string(out_dir.join("snapshot_x_0.100.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(snap.lines().next().unwrap()).unwrap();
    assert!(first["x"].as_f64().is_some() && first["abs2"].as_f64().is_some());
}

#[test]
fn output_directory_from_environment() {
    let root = tempfile::tempdir().unwrap();
    let cfg = write_config(root.path(), "times.stop = 0.1\ntimes.step = 0.1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_wallbounce"))
        .args(["run", &cfg])
        .env("WALLBOUNCE_OUTPUT_ROOT", root.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.path().join("case").join("series.csv").is_file());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["times.step = 0\n", "times.step = -0.1\n", "packet.alpha = -1\n", "bogus = 1\n", "packet.x0 = 2\n"] {
        let cfg = write_config(dir.path(), body);
        let out = wallbounce(&["run", &cfg, "--output-dir", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{body}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(wallbounce(&["run", "no_such_scenario"]).status.code(), Some(1));
}

#[test]
fn resolution_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "times.stop = 0.1\ntimes.step = 0.1\nquadrature.nodes = 64\n");
    let out = wallbounce(&["run", &cfg, "--output-dir", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("momentum node spacing"));
}

#[test]
fn accept_rejects_missing_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing");
    let out = wallbounce(&["accept", "--output-dir", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_scenarios_names_every_figure() {
    let out = wallbounce(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "standard",
        "fig1_gaussian",
        "fig2_lorentzian",
        "fig3_collision",
        "fig4_alpha_half",
        "fig5_alpha_1_3",
        "fig5_alpha_1_2",
        "fig5_alpha_1",
        "fig5_alpha_2",
        "fig5_alpha_3",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
