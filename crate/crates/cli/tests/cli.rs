use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn reslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reslab"))
        .current_dir(dir)
        .env_remove("RESLAB_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exponents_prints_exact_range() {
    let d = TempDir::new().unwrap();
    let o = reslab(d.path(), &["exponents", "--n", "2", "--r", "inf"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("p_max = 4/3, q_max(p) = p'/2"));
    let o = reslab(d.path(), &["exponents", "--n", "2", "--r", "2", "--p", "4/3", "--d", "1", "--alpha", "1/2", "--beta", "1/2"]);
    let out = stdout(&o);
    assert!(out.contains("q_max(p) = p'/4"), "{out}");
    assert!(out.contains("q_max(4/3) = 1"), "{out}");
    assert!(out.contains("= 6/5"), "{out}");
}

#[test]
fn dirac_alpha_is_zero() {
    let d = TempDir::new().unwrap();
    let o = reslab(d.path(), &["measure", "new", "--kind", "dirac", "--dim", "1", "--N", "256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = reslab(d.path(), &["analyze", "--alpha"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("alpha_hat = 0.0000"));
    let a = json(&d.path().join("analysis.json"));
    assert_eq!(a["payload"]["regularity"]["alpha_hat"].as_f64(), Some(0.0));
    assert_eq!(a["schema_version"], 1);
    assert_eq!(a["seed"], 0);
    assert!(a["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn verify_expid_passes() {
    let d = TempDir::new().unwrap();
    let o = reslab(d.path(), &["verify", "--suite", "expid", "--n", "2", "--r", "2", "--p", "4/3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&d.path().join("report.json"));
    assert_eq!(r["payload"]["passed"], true);
}

#[test]
fn failing_suite_exits_one() {
    let d = TempDir::new().unwrap();
    reslab(d.path(), &["measure", "new", "--kind", "dirac", "--N", "1024"]);
    // a Dirac mass has |μ̂| ≡ 1, so no s levels off, contradicting γ = 0.9
    let o = reslab(d.path(), &["verify", "--suite", "prop2", "--measure", "measure.json", "--gamma", "0.9", "--s-values", "8"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(d.path().join("report.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let o = reslab(d.path(), &["exponents", "--n", "2", "--r", "inf", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    let o = reslab(d.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = reslab(d.path(), &["verify", "--suite", "chain"]);
    assert_eq!(o.status.code(), Some(2));
    let o = reslab(d.path(), &["analyze", "--measure", "missing.json", "--alpha"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_overrun_names_the_budget() {
    let d = TempDir::new().unwrap();
    reslab(d.path(), &["measure", "new", "--kind", "uniform", "--N", "1024"]);
    let o = reslab(d.path(), &["probe", "-p", "2", "-q", "2", "-X", "20000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("max_matrix_entries"), "{}", stderr(&o));
}

#[test]
fn report_handles_empty_and_malformed_sweeps() {
    let d = TempDir::new().unwrap();
    fs::write(
        d.path().join("empty.csv"),
        "p,q,norm_X64,slope,residual,class,in_theorem_region,in_knapp_region\n",
    )
    .unwrap();
    let o = reslab(d.path(), &["report", "--sweep", "empty.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.trim_end().ends_with("|---|---|---|---|---|---|---|"), "{md}");
    fs::write(d.path().join("bad.csv"), "p,q\n4/3\n").unwrap();
    let o = reslab(d.path(), &["report", "--sweep", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn random_flat_pipeline_marks_the_corner_bounded() {
    let d = TempDir::new().unwrap();
    let run = |args: &[&str]| {
        let o = reslab(d.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        o
    };
    run(&["--seed", "11", "measure", "new", "--kind", "random-flat", "--N", "4096", "--m", "185"]);
    run(&["analyze", "--alpha", "--gamma"]);
    let o = run(&["--seed", "11", "sweep", "--p-grid", "4/3", "--q-grid", "2", "--X", "64,128,256,512"]);
    assert!(stderr(&o).contains("[1/1]"), "progress goes to stderr");
    assert!(!stdout(&o).contains("[1/1]"));
    let first = fs::read(d.path().join("sweep.csv")).unwrap();
    assert!(String::from_utf8_lossy(&first).starts_with("# schema_version=1 config_hash="));
    run(&["--seed", "11", "sweep", "--p-grid", "4/3", "--q-grid", "2", "--X", "64,128,256,512", "--out", "again.csv"]);
    assert_eq!(first, fs::read(d.path().join("again.csv")).unwrap());
    let o = run(&["report", "--analysis", "analysis.json"]);
    let md = stdout(&o);
    assert!(md.contains("| 4/3 | 2 |") && md.contains("| bounded | yes |"), "{md}");
    assert!(md.contains("| alpha_hat |"));
}

#[test]
fn out_dir_from_environment_and_config_file() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("artifacts");
    fs::write(d.path().join("cfg.json"), r#"{"seed": 5, "probe": {"restarts": 2}}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_reslab"))
        .current_dir(d.path())
        .env("RESLAB_OUT_DIR", &out)
        .args(["--config", "cfg.json", "measure", "new", "--kind", "uniform", "--N", "64"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&out.join("measure.json"));
    assert_eq!(m["N"], 64);
    assert!(m["config_hash"].is_string());
    // inputs fall back to the output directory
    let o = Command::new(env!("CARGO_BIN_EXE_reslab"))
        .current_dir(d.path())
        .env("RESLAB_OUT_DIR", &out)
        .args(["--config", "cfg.json", "--threads", "2", "probe", "-p", "2", "-q", "2", "-X", "8"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = json(&out.join("probe.json"));
    assert_eq!(p["seed"], 5);
    assert_eq!(p["payload"]["restarts_used"].as_u64().map(|v| v <= 4), Some(true));
}

#[test]
fn reflect_and_conv() {
    let d = TempDir::new().unwrap();
    reslab(d.path(), &["measure", "new", "--kind", "cantor", "--stage", "3"]);
    let o = reslab(d.path(), &["measure", "reflect", "--measure", "measure.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.path().join("reflected.json"));
    assert_eq!(m["atoms"].as_array().unwrap().len(), 8);
    let o = reslab(d.path(), &["conv", "--measure", "measure.json", "-n", "2", "-r", "inf", "--resolutions", "16,64,256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for line in ["16,2,inf,4", "64,2,inf,8", "256,2,inf,16"] {
        assert!(out.contains(line), "{out}");
    }
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let d = TempDir::new().unwrap();
    reslab(d.path(), &["--seed", "3", "measure", "new", "--kind", "random-flat", "--N", "1024", "--m", "60"]);
    for t in ["1", "4"] {
        let out = format!("sweep{t}.csv");
        let o = reslab(
            d.path(),
            &["--threads", t, "--seed", "3", "sweep", "--p-grid", "1:2:1/2", "--q-grid", "2,4", "--X", "8,16,32,64", "--out", &out],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(fs::read(d.path().join("sweep1.csv")).unwrap(), fs::read(d.path().join("sweep4.csv")).unwrap());
}
