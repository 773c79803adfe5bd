//! End-to-end runs of the `channelgeo` binary against the shipped configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn run(args: &[&str], config: &Path, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_channelgeo"));
    cmd.args(args).arg("--config").arg(config);
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn passing_configs_exit_zero() {
    for (kind, name) in [
        ("complexity", "complexity_sigma_z.json"),
        ("complexity", "complexity_penalty_3q.json"),
        ("complexity", "complexity_sweep_t.json"),
        ("channel", "channel_coupled.json"),
        ("cohering-power", "cohering_hadamard.json"),
        ("rode", "rode_gaussian.json"),
        ("rode", "rode_bounded_matched.json"),
        ("decompose", "decompose_qft3.json"),
    ] {
        let out = run(&[kind], &config(name), None);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn sigma_z_report_values() {
    let r = report(&run(&["complexity"], &config("complexity_sigma_z.json"), None));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["kind"], "complexity");
    let g = r["scalars"]["G_hs"].as_f64().unwrap();
    assert!((g - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn failing_checks_give_exit_one() {
    // the perturbative sweep reaches epsilon values where the constant check fails
    let out = run(&["noise"], &config("noise_perturbative_sweep.json"), None);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    let failed = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["checks"].as_array().unwrap().clone())
        .filter(|c| c["holds"] == false)
        .count();
    assert!(failed > 0);
}

#[test]
fn reports_are_byte_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("rode_{threads}.json"));
        let status = run(&["rode", "--threads", threads], &config("rode_bounded_matched.json"), Some(&out));
        assert_eq!(status.status.code(), Some(0));
        texts.push((std::fs::read(&out).unwrap(), std::fs::read(out.with_extension("csv")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn seed_override_changes_trajectories() {
    let a = run(&["rode", "--seed", "1"], &config("rode_gaussian.json"), None);
    let b = run(&["rode", "--seed", "2"], &config("rode_gaussian.json"), None);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["seed"], 1);
    assert_eq!(rb["seed"], 2);
    assert_ne!(ra["scalars"]["mean_distance"], rb["scalars"]["mean_distance"]);
}

#[test]
fn sweep_writes_csv_with_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let status = run(&["complexity"], &config("complexity_sweep_t.json"), Some(&out));
    assert_eq!(status.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(out.with_extension("csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[0], "t");
    assert_eq!(header[1], "all_hold");
    assert_eq!(header.iter().filter(|h| *h == "t").count(), 1);
    let g = header.iter().position(|h| h == "G_hs").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    // G_hs is linear in t
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        let val: f64 = row[g].parse().unwrap();
        assert!((val - t * 0.5773502691896257).abs() < 1e-12);
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("version.json", r#"{"schema_version": 99, "seed": 0}"#, "schema_version"),
        ("unknown.json", "{\"schema_version\": 1,\n \"seed\": 0, \"bogus\": 1}", "line 2"),
        ("missing.json", r#"{"schema_version": 1, "seed": 0}"#, "complexity"),
        (
            "nonherm.json",
            r#"{"schema_version": 1, "seed": 0, "complexity": {"hamiltonian": [[[0,0],[1,0]],[[0,0],[0,0]]], "t": 1}}"#,
            "hamiltonian",
        ),
    ];
    for (file, body, needle) in cases {
        let path = dir.path().join(file);
        std::fs::write(&path, body).unwrap();
        let out = run(&["complexity"], &path, None);
        assert_eq!(out.status.code(), Some(2), "{file}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{file}: {err}");
    }
}
