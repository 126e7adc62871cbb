use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kpzlab::experiment::{parse_manifest, MANIFEST_FILE};

fn kpzlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpzlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const FBM: &str = "\
[run]
seed = 11
replicas = 4

[grid]
t_end = 2.0
nt = 2048

[stats]
compute = [\"variation\", \"increments\"]
alpha = [4]
epsilon = [0.0078125, 0.015625]
";

#[test]
fn fbm_run_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FBM);
    let mut manifests = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = kpzlab(&["fbm", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert!(stdout.starts_with("statistic"), "{stdout}");
        assert!(stdout.contains("6/pi"));
        manifests.push(parse_manifest(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap());
    }
    assert_eq!(manifests[0].outputs, manifests[1].outputs);
    assert_eq!(manifests[0].replica_seeds, (0..4).map(|r| (11, r)).collect::<Vec<_>>());
}

#[test]
fn seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FBM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(kpzlab(&["fbm", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(kpzlab(&["fbm", "--config", &cfg, "--seed", "12", "--out", b.to_str().unwrap()]).status.success());
    assert_ne!(fs::read(a.join("paths.csv")).unwrap(), fs::read(b.join("paths.csv")).unwrap());
}

#[test]
fn configuration_errors_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[run]\nreplicas = 0\n[stats]\nepslion = [0.1]\n");
    let o = kpzlab(&["fbm", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for needle in ["epslion", "run.seed", "run.replicas"] {
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn subcommand_must_match_declared_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[run]\nkind = \"stats\"\nseed = 1\n");
    let o = kpzlab(&["fbm", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_guard_flag() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[run]\nseed = 2\nreplicas = 2\n[grid]\nx_min = -1.0\nx_max = 1.0\nnx = 32\nt_end = 0.25\nnt = 16\n\
                [ic]\nkind = \"function\"\nexpr = \"0\"\n";
    let cfg = write_config(dir.path(), text);
    let out = dir.path().join("o");
    let refused = kpzlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("boundary guard"));
    let ok = kpzlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--override-boundary-guard"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(out.join("paths.csv").exists());
}

#[test]
fn stats_on_saved_paths_and_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FBM);
    let sim = dir.path().join("sim");
    assert!(kpzlab(&["fbm", "--config", &cfg, "--out", sim.to_str().unwrap()]).status.success());
    let stats_cfg = dir.path().join("stats.toml");
    fs::write(&stats_cfg, "[run]\nseed = 0\n[stats]\ncompute = [\"variation\"]\nalpha = [4]\nepsilon = [0.0078125]\n").unwrap();
    let st = dir.path().join("st");
    let o = kpzlab(&[
        "stats",
        "--config",
        stats_cfg.to_str().unwrap(),
        "--input",
        sim.join("paths.csv").to_str().unwrap(),
        "--out",
        st.to_str().unwrap(),
        "--report",
        "csv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sim_summary = fs::read_to_string(sim.join("summary.csv")).unwrap();
    let st_summary = fs::read_to_string(st.join("summary.csv")).unwrap();
    let first_row = |s: &str| s.lines().nth(1).unwrap().to_string();
    assert_eq!(first_row(&sim_summary), first_row(&st_summary));
    let report = fs::read_to_string(st.join("report_table.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().contains("1.909859"));
}

#[test]
fn verify_writes_one_row_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = kpzlab(&["verify", "--seed", "5", "--checks", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "check,target,measured,se,tolerance,pass");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("\"criterion 10") && lines[1].ends_with("true"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("criterion 10 PASS"));
}
