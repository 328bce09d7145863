use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_blfq-vqe");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("BLFQ_VQE_OUT").output().unwrap()
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut a: Vec<&str> = args.to_vec();
    a.extend(["--out", out.to_str().unwrap()]);
    run(&a)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// Every output file except the provenance record.
fn result_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "provenance.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn hamiltonian_output() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["hamiltonian"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let h = json(&tmp.path().join("hamiltonian.json"));
    let h00 = h["matrix"][0][0].as_f64().unwrap();
    assert!((h00 / 640323.0 - 1.0).abs() < 0.02);
    assert_eq!(h["units"], "MeV^2");
    assert_eq!(h["eigenvalues"].as_array().unwrap().len(), 4);
    let compact = h["pauli"]["compact"].as_array().unwrap();
    assert_eq!(compact.len(), 6);
    let zz = compact.iter().find(|t| t["label"] == "ZZ").unwrap()["coefficient"].as_f64().unwrap();
    assert!((zz / 146807.0 - 1.0).abs() < 0.02);
    assert!(String::from_utf8_lossy(&o.stdout).contains("ZZ"));
    for name in ["config.txt", "provenance.json"] {
        assert!(tmp.path().join(name).exists());
    }
}

#[test]
fn zero_coupling_is_diagonal() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), &["hamiltonian", "--gpi", "0"]).status.success());
    let h = json(&tmp.path().join("hamiltonian.json"));
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert_eq!(h["matrix"][i][j].as_f64().unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn exact_vqe_reaches_ground() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["vqe", "--encoding", "direct"]);
    assert!(o.status.success());
    let v = json(&tmp.path().join("vqe.json"));
    let e = v["energy_mev2"].as_f64().unwrap();
    assert!((e / 19488.0 - 1.0).abs() < 1e-3, "{e}");
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["converged"], true);
    let (header, rows) = csv_rows(&tmp.path().join("vqe_trace.csv"));
    assert_eq!(header, ["iteration", "energy_MeV2", "mode"]);
    assert!(rows.iter().all(|r| r[2] == "exact"));
}

#[test]
fn noisy_trace_is_labeled() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["vqe", "--mode", "noisy", "--mitigate", "--shots", "2048", "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&tmp.path().join("vqe_trace.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[2] == "sampled+noise+mitigation"));
    assert_eq!(json(&tmp.path().join("vqe.json"))["mode"], "sampled+noise+mitigation");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["vqe", "--mode", "noisy", "--mitigate", "--seed", "42", "--shots", "4096"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    assert_eq!(result_files(a.path()), result_files(b.path()));

    let c = tempfile::tempdir().unwrap();
    let mut other = args.to_vec();
    other[5] = "43";
    assert!(run_in(c.path(), &other).status.success());
    assert_ne!(
        fs::read(a.path().join("vqe_trace.csv")).unwrap(),
        fs::read(c.path().join("vqe_trace.csv")).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["scaling", "--seed", "3", "--set", "scaling_repeats=50"];
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    assert!(run_in(a.path(), &one).status.success());
    assert!(run_in(b.path(), &args).status.success());
    assert_eq!(result_files(a.path()), result_files(b.path()));
}

#[test]
fn rerun_from_recorded_config() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = run_in(a.path(), &["vqe", "--mode", "sampled", "--seed", "9", "--set", "ftol=2", "--encoding", "bk"]);
    assert!(o.status.success());
    let cfg = a.path().join("config.txt");
    assert!(run_in(b.path(), &["vqe", "--config", cfg.to_str().unwrap()]).status.success());
    assert_eq!(result_files(a.path()), result_files(b.path()));
    let prov = json(&a.path().join("provenance.json"));
    assert_eq!(prov["config_hash"], json(&a.path().join("vqe.json"))["config_hash"]);
    assert_eq!(prov["config_hash"], json(&b.path().join("provenance.json"))["config_hash"]);
    assert!(prov["created_unix"].as_u64().unwrap() > 0);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("run.cfg");
    fs::write(&file, "# test\nencoding = direct\nseed = 1\n").unwrap();
    let out = tmp.path().join("o");
    let o = run_in(&out, &["vqe", "--config", file.to_str().unwrap(), "--encoding", "compact"]);
    assert!(o.status.success());
    assert_eq!(json(&out.join("vqe.json"))["encoding"], "compact");
    assert_eq!(json(&out.join("vqe.json"))["seed"], 1);
}

#[test]
fn observables_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["observables", "--exact"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&tmp.path().join("observables.json"));
    let rc = v["form_factor"]["charge_radius_per_mev"].as_f64().unwrap();
    assert!((rc / 6.31e-3 - 1.0).abs() < 0.01);
    let p = v["scaling"]["fit_exponent"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&p));
    assert_eq!(v["mode"], "exact");
    assert!((v["decay"]["f_pi_mev"].as_f64().unwrap() - v["decay"]["f_pi_projector_mev"].as_f64().unwrap()).abs() < 1e-10);

    let (header, rows) = csv_rows(&tmp.path().join("form_factor.csv"));
    assert_eq!(header, ["Q2_MeV2", "F_P", "mode"]);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert!((rows[0][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    assert!(rows.len() >= 50);
    let (header, rows) = csv_rows(&tmp.path().join("pdf.csv"));
    assert_eq!(header, ["x", "f_quark", "f_antiquark", "mode"]);
    assert_eq!(rows.len(), 99);
    let (header, _) = csv_rows(&tmp.path().join("scaling.csv"));
    assert!(header.contains(&"shots_per_term".to_string()));
}

#[test]
fn observables_from_angles_and_vqe() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["observables", "--angles", "0,0,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&tmp.path().join("observables.json"))["source"], "angles");
    assert!(run_in(tmp.path(), &["observables", "--angles", "-0.5,1.2,2"]).status.success());
    assert_eq!(run_in(tmp.path(), &["observables", "--angles", "1,2"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["observables", "--mode", "sampled", "--seed", "2"]);
    assert!(o.status.success());
    let v = json(&tmp.path().join("observables.json"));
    assert_eq!(v["source"], "vqe");
    assert_eq!(v["mode"], "sampled");
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(BIN).args(["hamiltonian"]).env("BLFQ_VQE_OUT", tmp.path()).output().unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("hamiltonian.json").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run_in(tmp.path(), args).status.code().unwrap();
    assert_eq!(code(&["vqe", "--set", "bogus=1"]), 2);
    assert_eq!(code(&["vqe", "--encoding", "ternary"]), 2);
    assert_eq!(code(&["vqe", "--mitigate"]), 2);
    assert_eq!(code(&["vqe", "--mode", "noisy", "--noise-p01", "0.9"]), 2);
    assert_eq!(code(&["vqe", "--shots", "0", "--mode", "sampled"]), 2);
    assert_eq!(code(&["hamiltonian", "--set", "n_max=1"]), 2);
    assert_eq!(code(&["vqe", "--config", "/nonexistent/file"]), 1);
    assert_eq!(code(&["frobnicate"]), 2);
    // budget too small to converge: files are still written
    assert_eq!(code(&["vqe", "--set", "max_iterations=2", "--set", "restarts=0"]), 3);
    assert!(tmp.path().join("vqe_trace.csv").exists());
    // a vanishing oscillator scale overflows the longitudinal exponents
    assert_eq!(code(&["observables", "--exact", "--set", "kappa=1e-3"]), 4);
}
