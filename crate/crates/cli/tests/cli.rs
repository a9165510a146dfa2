use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cospec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cospec")).args(args).env_remove("COSPECTRAL_THREADS").output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = cospec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn invariants_of_k2() {
    let v = ok_json(&["invariants", "--graph6", "A_"]);
    assert_eq!(v["energy_marginal"], serde_json::json!({"-1": 2, "1": 2}));
    assert_eq!(v["graph"]["n"], 2);
    let out = cospec(&["invariants", "--graph6", "A_"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy marginal {-1:2, 1:2}"));
}

#[test]
fn compare_g13_pair_with_triplet() {
    let v = ok_json(&["compare", "--fixtures", "G13", "G13p", "--observables", "e,m,omega2"]);
    assert_eq!(v["longitudinal_co_ising"], true);
    assert_eq!(v["multivariate_equal"], false);
    assert_eq!(v["adjacency_cospectral"], true);
    assert_eq!(v["observables"], serde_json::json!(["e", "m", "omega2"]));
}

#[test]
fn compare_with_quantum_probe() {
    let v = ok_json(&["compare", "--fixture", "G3", "--fixture", "G4", "--probe", "--J", "1", "--h", "1/7", "--Delta", "0.5"]);
    assert_eq!(v["co_ising"], true);
    assert_eq!(v["quantum"]["verdict"], "distinguished");
    assert_eq!(v["quantum"]["couplings"]["h"], "1/7");
    assert_eq!(v["quantum"]["couplings"]["Delta"], "1/2");
}

#[test]
fn qspectrum_dense_and_krylov_agree() {
    let dense = ok_json(&["qspectrum", "--fixture", "G3"]);
    let krylov = ok_json(&["qspectrum", "--fixture", "G3", "--k", "3"]);
    for i in 0..3 {
        let (a, b) = (dense["spectrum"]["eigenvalues"][i].as_f64().unwrap(), krylov["spectrum"]["eigenvalues"][i].as_f64().unwrap());
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(dense["spectrum"]["provenance"]["kind"], "dense");
}

#[test]
fn refusals_exit_one() {
    let out = cospec(&["qspectrum", "--fixture", "G27"]);
    assert_eq!(code(&out), 1);
    let out = cospec(&["qspectrum", "--fixture", "G13p", "--k", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&cospec(&["frobnicate"])), 2);
    assert_eq!(code(&cospec(&["invariants", "--fixture", "G1", "--bogus"])), 2);
    assert_eq!(code(&cospec(&["invariants", "--fixture", "NOPE"])), 2);
    assert_eq!(code(&cospec(&["invariants", "--graph6", "A!"])), 2);
    assert_eq!(code(&cospec(&["compare", "--fixture", "G1"])), 2);
    assert_eq!(code(&cospec(&["sample", "--fixture", "G3"])), 2);
    assert_eq!(code(&cospec(&["sweep", "--fixture", "G3", "--J", "1/0"])), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_cospec")).args(["fixtures"]).env("COSPECTRAL_THREADS", "zero").output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let out = cospec(&["sweep", "--fixture", "G3", "--k", "4", "--grid", "5", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,index,lambda_shifted");
    assert_eq!(lines.len(), 1 + 5 * 4);
    assert!(lines[1].starts_with("0,1,0"));
}

#[test]
fn sample_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    let args = ["sample", "--fixture", "G1", "--beta", "0.6", "--sweeps", "40000", "--chains", "4", "--seed", "11", "--bootstrap", "200"];
    let run = |p: &Path| {
        let mut a: Vec<&str> = args.to_vec();
        a.extend(["--out", p.to_str().unwrap()]);
        assert!(cospec(&a).status.success());
        std::fs::read_to_string(p).unwrap()
    };
    let first = run(&h);
    assert_eq!(first, run(&dir.path().join("h2.csv")));
    assert!(first.starts_with("bin_index,e,m,count,probability,ci_low,ci_high\n"));
    let v = ok_json(&["fit", "--fixture", "G1", "--target", h.to_str().unwrap(), "--beta-grid", "0:2:0.1"]);
    let beta = v["fit"]["beta"].as_f64().unwrap();
    assert!((beta - 0.6).abs() < 0.11, "{beta}");
    assert_eq!(v["samples"], 160000);
}

#[test]
fn exact_sampling_needs_no_seed() {
    let out = cospec(&["sample", "--edges", "1,2", "--n", "2", "--beta", "0", "--exact"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "bin_index,e,m,probability\n0,-1,0,0.5\n1,1,-2,0.25\n2,1,2,0.25\n");
}

#[test]
fn scan_built_in_and_file_families() {
    let v = ok_json(&["scan", "--trees", "6"]);
    assert_eq!(v["graphs"], 6);
    assert_eq!(v["non_isomorphic_pairs"], 15);
    let v = ok_json(&["scan", "--graphs", "4", "--level", "quantum-extremal"]);
    assert_eq!(v["non_isomorphic_pairs"], 0);
    assert_eq!(v["level"]["kind"], "quantum-extremal");

    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.g6");
    std::fs::write(&good, "CF\nCU\n").unwrap();
    let v = ok_json(&["scan", "--input", good.to_str().unwrap(), "--level", "longitudinal"]);
    assert_eq!(v["graphs"], 2);
    let bad = dir.path().join("bad.g6");
    std::fs::write(&bad, "CF\nC~~\n").unwrap();
    let out = cospec(&["scan", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cospec")).args(["scan", "--trees", "5"]).env("COSPECTRAL_THREADS", "2").output().unwrap();
    assert!(out.status.success());
}

#[test]
fn help_lists_flags_with_units_and_defaults() {
    let out = cospec(&["sweep", "--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for needle in ["--k <COUNT>", "[default: 20]", "--grid <POINTS>", "[default: 101]", "--Delta <RATIONAL>", "energy units", "--tol <ENERGY>"] {
        assert!(help.contains(needle), "missing {needle:?} in\n{help}");
    }
    let out = cospec(&["--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for sub in ["invariants", "compare", "qspectrum", "sweep", "sample", "fit", "scan", "fixtures", "COSPECTRAL_THREADS"] {
        assert!(help.contains(sub));
    }
    assert_eq!(code(&out), 0);
}

#[test]
fn fixtures_listing() {
    let v = ok_json(&["fixtures"]);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|f| f["source"].as_str().unwrap()).collect();
    assert!(names.contains(&"G13p") && names.contains(&"G27r"));
}
