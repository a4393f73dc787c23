use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinfact")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn algebra_summary_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("algebra.json");
    let o = spinfact(&["algebra", "--family", "s2-iiab", "--mode", "discovery", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dim=5 center=2 derived=3 ideals=3x1"), "{}", stdout(&o));
    let j = read_json(&out);
    assert_eq!(j["dimension"], 5);
    assert_eq!(j["config"]["mode"], "discovery");
    assert!(!j["structure_constants"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_family_is_usage_error() {
    assert_eq!(spinfact(&["algebra", "--family", "s9"]).status.code(), Some(2));
    assert_eq!(spinfact(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn factorize_grid_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let fdir = dir.path().join("fac");
    let o = spinfact(&["factorize", "--family", "s2-ijaa", "--out", fdir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut files: Vec<_> = std::fs::read_dir(&fdir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 9);
    for f in &files {
        let j = read_json(f);
        assert!(j["fock_residual"].as_f64().unwrap() < 1e-6);
        assert!(j["cost_residual"].as_f64().unwrap() < 1e-10);
    }
    let mid = read_json(&files[4]);
    assert_eq!(mid["theta"], 0.0);
    assert!(mid["central"].as_array().unwrap().iter().all(|c| c["angle"] == 0.0));
    assert!(mid["semisimple"].as_array().unwrap().iter().all(|c| c["t"] == 0.0));

    let s1 = dir.path().join("s1.json");
    let s2 = dir.path().join("s2.json");
    for s in [&s1, &s2] {
        let o = spinfact(&["schedule", files[2].to_str().unwrap(), "--check", "--out", s.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("total_strings=48"), "{}", stdout(&o));
        assert!(stdout(&o).contains("(ok)"));
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());
    let j = read_json(&s1);
    assert_eq!(j["n_qubits"], 6);
    assert_eq!(j["entries"][0]["pauli"].as_str().unwrap().len(), 6);
}

#[test]
fn schedule_rejects_missing_input() {
    assert_eq!(spinfact(&["schedule", "/nonexistent/factorization.json"]).status.code(), Some(2));
}

#[test]
fn vqe_synthetic_run_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vqe_run.json");
    let csv = dir.path().join("run.csv");
    let o = spinfact(&[
        "vqe", "--synthetic", "3,0", "--pool", "sa", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let j = read_json(&out);
    assert_eq!(j["converged"], true);
    assert_eq!(j["config"]["source"], "synthetic:3,0");
    for it in j["iterations"].as_array().unwrap() {
        assert!(it["s2"].as_f64().unwrap().abs() < 1e-8);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("iteration,energy,s2,max_gradient\n"));
}

#[test]
fn vqe_config_file_and_fcidump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("sys.fcidump");
    std::fs::write(&dump, spinfact::vqe::write_fcidump(&spinfact::vqe::synth_integrals(3, 4).unwrap())).unwrap();
    let cfg = dir.path().join("cfg.json");
    let config = serde_json::json!({ "pool": "pair", "source": dump.to_str().unwrap(), "grad_tol": 1e-5, "max_iters": 50 });
    std::fs::write(&cfg, config.to_string()).unwrap();
    let o = spinfact(&["vqe", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["pool"], "pair");
    assert!(j["reference_energy"].as_f64().is_some());

    std::fs::write(&cfg, r#"{"pool": "sa", "bogus": 1}"#).unwrap();
    assert_eq!(spinfact(&["vqe", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(spinfact(&["vqe", "--fcidump", "/nonexistent.fcidump"]).status.code(), Some(2));
    std::fs::write(&dump, "&FCI NORB=2 &END\n").unwrap();
    assert_eq!(spinfact(&["vqe", "--fcidump", dump.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn vqe_iteration_limit_is_numerical_failure() {
    let o = spinfact(&["vqe", "--synthetic", "4,0", "--pool", "sd", "--max-iters", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("converged=false"));
}

#[test]
fn verify_all_subset() {
    let o = spinfact(&["verify-all", "--only", "2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS [ 2]") && text.contains("PASS [ 3]"));
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(spinfact(&["verify-all", "--only", "12"]).status.code(), Some(2));
}
