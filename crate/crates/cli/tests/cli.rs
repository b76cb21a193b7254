//! End-to-end runs of the `colmix` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn colmix(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colmix")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn run_ok(out: &Path, args: &[&str]) -> Output {
    let o = colmix(out, args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn sub(tmp: &TempDir, name: &str) -> PathBuf {
    tmp.path().join(name)
}

/// Every file the manifest names exists with the recorded size and digest.
fn assert_manifest_verifies(dir: &Path) -> Vec<String> {
    let manifest = json(dir, "manifest.json");
    assert_eq!(manifest["tool"], "colmix");
    assert!(manifest["timings_ms"]["total"].as_f64().unwrap() >= 0.0);
    let mut names = Vec::new();
    for entry in manifest["outputs"].as_array().unwrap() {
        let name = entry["path"].as_str().unwrap();
        let bytes = std::fs::read(dir.join(name)).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap(), bytes.len() as u64, "{name}");
        assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)), "{name}");
        names.push(name.to_string());
    }
    names
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn gibbs_examples() {
    let tmp = TempDir::new().unwrap();
    run_ok(&sub(&tmp, "q"), &["gibbs"]);
    let ev: Vec<f64> = serde_json::from_value(json(&sub(&tmp, "q"), "gibbs.json")["eigenvalues"].clone()).unwrap();
    assert!((ev[1] - 0.7311).abs() < 1e-4 && (ev[0] - 0.2689).abs() < 1e-4);

    run_ok(&sub(&tmp, "zero"), &["gibbs", "-p", "hamiltonian=zero", "-p", "dim=3"]);
    run_ok(&sub(&tmp, "hot"), &["gibbs", "-p", "beta=0"]);
    for (dir, d) in [("zero", 3), ("hot", 2)] {
        let state = &json(&sub(&tmp, dir), "gibbs.json")["state"];
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 / d as f64 } else { 0.0 };
                assert!((state["re"][i][j].as_f64().unwrap() - expect).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn collide_reports_identity_and_reproduces() {
    let tmp = TempDir::new().unwrap();
    let o = run_ok(&sub(&tmp, "x"), &["collide"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("identity") && stdout.contains("residual") && stdout.contains("holds"), "{stdout}");
    assert!(json(&sub(&tmp, "x"), "collide.json")["identity_residual"].as_f64().unwrap() < 1e-9);

    let args = [
        "collide",
        "--seed",
        "5",
        "-p",
        "hamiltonian=random",
        "-p",
        "unitary=random",
        "-p",
        "dim=4",
        "-p",
        "collisions=6",
    ];
    run_ok(&sub(&tmp, "a"), &args);
    run_ok(&sub(&tmp, "b"), &args);
    let a = read(&sub(&tmp, "a"), "ledger.csv");
    assert_eq!(a, read(&sub(&tmp, "b"), "ledger.csv"));
    assert_eq!(a.lines().count(), 7);

    run_ok(&sub(&tmp, "id"), &["collide", "-p", "unitary=identity"]);
    for row in csv_rows(&read(&sub(&tmp, "id"), "ledger.csv")) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn mix_sweep_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = sub(&tmp, "s");
    run_ok(&dir, &["mix-sweep"]);
    let names = assert_manifest_verifies(&dir);
    for f in ["sweep.csv", "extrapolation.json", "gap_plot.csv", "gap_plot.svg", "config.json"] {
        assert!(names.iter().any(|n| n == f), "{f} missing from manifest");
    }
    let rows = csv_rows(&read(&dir, "sweep.csv"));
    let ns: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns, (0..=12).map(|k| 1usize << k).collect::<Vec<_>>());
    let gaps: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(gaps[12] * 10.0 < gaps[0]);
    let plot = read(&dir, "gap_plot.csv");
    assert!(plot.starts_with("n,gap_nats\n"));
    assert_eq!(plot.lines().count(), 14);
    assert!(read(&dir, "gap_plot.svg").starts_with("<svg"));

    let same = sub(&tmp, "same");
    run_ok(&same, &["mix-sweep", "-p", r#"sigma={"p":[0.7,0.3]}"#, "-p", "n_max=64"]);
    for r in csv_rows(&read(&same, "sweep.csv")) {
        assert!(r[4].parse::<f64>().unwrap().abs() < 1e-9);
    }
}

#[test]
fn dense_quantum_sweep_fits_under_cap() {
    let tmp = TempDir::new().unwrap();
    let dir = sub(&tmp, "q");
    run_ok(&dir, &["mix-sweep", "-p", "sigma=random", "-p", "rho=random", "-p", "grid=linear", "-p", "n_max=10"]);
    let rows = csv_rows(&read(&dir, "sweep.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1] == "dense"));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(colmix(&sub(&tmp, "a"), &["appendix"]).status.code(), Some(0));
    let zero = colmix(&sub(&tmp, "z"), &["appendix", "-p", "insertion_rho=[0.0]"]);
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("diverges"));
    let bad = colmix(&sub(&tmp, "b"), &["gibbs", "-p", r#"hamiltonian={"dim":2,"re":[[0,1],[0,0]]}"#]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(colmix(&sub(&tmp, "u"), &["gibbs", "-p", "bogus=1"]).status.code(), Some(2));
    let cap = colmix(
        &sub(&tmp, "c"),
        &["mix-sweep", "-p", "sigma=random", "-p", "rho=random", "-p", "n_max=16", "--dense-cap", "64"],
    );
    assert_eq!(cap.status.code(), Some(3));
    let mismatch = colmix(
        &sub(&tmp, "m"),
        &["mix-sweep", "-p", "sigma=random", "-p", "rho=random", "-p", "method=classical-exact"],
    );
    assert_eq!(mismatch.status.code(), Some(2));
    assert_eq!(colmix(&sub(&tmp, "v"), &["verify", "-p", "tolerance_override=1e-30"]).status.code(), Some(1));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (sub(&tmp, "a"), sub(&tmp, "b"));
    run_ok(&a, &["verify"]);
    run_ok(&b, &["verify"]);
    assert_eq!(read(&a, "verify.json"), read(&b, "verify.json"));
    let report = json(&a, "verify.json");
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 9);
    assert_manifest_verifies(&a);

    let low = sub(&tmp, "low");
    let o = run_ok(&low, &["verify", "--dense-cap", "64"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[SKIP] 4."));
    let c4 = &json(&low, "verify.json")["criteria"][3];
    assert_eq!(c4["status"], "skipped");
    assert!(c4["reason"].as_str().unwrap().starts_with("cap:"));
}

#[test]
fn identical_config_gives_identical_outputs() {
    let tmp = TempDir::new().unwrap();
    for (cmd, files) in [
        ("gibbs", vec!["gibbs.json", "config.json"]),
        ("collide", vec!["ledger.csv", "collide.json", "config.json"]),
        ("appendix", vec!["appendix.json", "config.json"]),
        ("mix-sweep", vec!["extrapolation.json", "gap_plot.csv", "gap_plot.svg", "config.json"]),
    ] {
        let first = sub(&tmp, &format!("{cmd}-1"));
        run_ok(&first, &[cmd, "--seed", "11"]);
        assert_manifest_verifies(&first);
        // Re-run from the recorded config alone.
        let cfg = first.join("config.json");
        let second = sub(&tmp, &format!("{cmd}-2"));
        run_ok(&second, &["--config", cfg.to_str().unwrap()]);
        for f in files {
            assert_eq!(read(&first, f), read(&second, f), "{cmd}: {f}");
        }
        if cmd == "mix-sweep" {
            // Timings aside, the records match byte for byte.
            let strip = |t: String| t.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
            assert_eq!(strip(read(&first, "sweep.csv")), strip(read(&second, "sweep.csv")));
        }
    }
}

#[test]
fn bits_are_nats_over_ln2() {
    let tmp = TempDir::new().unwrap();
    let ln2 = std::f64::consts::LN_2;
    let close = |bits: f64, nats: f64| (bits - nats / ln2).abs() <= 1e-12 * nats.abs().max(1.0);

    for cmd in ["gibbs", "collide", "mix-sweep", "appendix"] {
        run_ok(&sub(&tmp, &format!("{cmd}-n")), &[cmd]);
        run_ok(&sub(&tmp, &format!("{cmd}-b")), &[cmd, "--units", "bits"]);
    }
    let (n, b) = (json(&sub(&tmp, "gibbs-n"), "gibbs.json"), json(&sub(&tmp, "gibbs-b"), "gibbs.json"));
    assert!(close(b["entropy"].as_f64().unwrap(), n["entropy"].as_f64().unwrap()));

    let (n, b) = (read(&sub(&tmp, "collide-n"), "ledger.csv"), read(&sub(&tmp, "collide-b"), "ledger.csv"));
    for (rn, rb) in csv_rows(&n).iter().zip(csv_rows(&b)) {
        assert_eq!(rn[1], rb[1], "energy is not an entropy");
        for col in 3..6 {
            assert!(close(rb[col].parse().unwrap(), rn[col].parse().unwrap()));
        }
    }

    let (n, b) = (read(&sub(&tmp, "mix-sweep-n"), "sweep.csv"), read(&sub(&tmp, "mix-sweep-b"), "sweep.csv"));
    assert!(b.starts_with("n,method,S_mix_bits,S_rel_bits,gap_bits,wall_time_ms"));
    for (rn, rb) in csv_rows(&n).iter().zip(csv_rows(&b)) {
        for col in 2..5 {
            assert!(close(rb[col].parse().unwrap(), rn[col].parse().unwrap()));
        }
    }
    let (n, b) =
        (json(&sub(&tmp, "mix-sweep-n"), "extrapolation.json"), json(&sub(&tmp, "mix-sweep-b"), "extrapolation.json"));
    for k in ["a", "limit", "residual", "relative_entropy"] {
        assert!(close(b[k].as_f64().unwrap(), n[k].as_f64().unwrap()), "{k}");
    }

    let (n, b) = (json(&sub(&tmp, "appendix-n"), "appendix.json"), json(&sub(&tmp, "appendix-b"), "appendix.json"));
    for (rn, rb) in n["typicality"].as_array().unwrap().iter().zip(b["typicality"].as_array().unwrap()) {
        for k in ["lhs_per_symbol", "S_rho", "deficit"] {
            assert!(close(rb[k].as_f64().unwrap(), rn[k].as_f64().unwrap()), "{k}");
        }
    }
}
