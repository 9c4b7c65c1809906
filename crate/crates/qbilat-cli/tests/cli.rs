//! End-to-end runs of the binary: exit-code contract, report shape,
//! determinism of seeded scans, and the config/env precedence rules.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qbilat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("QBILAT_PREC").output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn eval_reports_value_and_bound() {
    let out = run(&["eval", "theta", "--q", "0.25", "--z", "1", "--prec", "128"]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    let v = doc["value"].as_str().unwrap();
    assert!(v.starts_with("0.12112"), "theta value {v}");
    assert!(doc["err_bound"].as_str().is_some());
    assert_eq!(doc["precision_bits"], 128);

    let out = run(&["eval", "qgamma", "--q", "0.5", "--z", "3"]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["value"].as_str().unwrap().starts_with("0.15000"));

    let out = run(&["eval", "qpoch", "--a", "0", "--q", "0.5"]);
    assert!(out.status.success());
    assert!(stdout_json(&out)["value"].as_str().unwrap().starts_with("0.10000"));
}

#[test]
fn verify_pass_and_exit_codes() {
    // a passing check
    let out = run(&[
        "verify", "--identity", "MAIN1", "--q", "0.25", "--beta", "0.6+0.1i", "--w", "0.7",
        "--deterministic",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["pass"], true);
    assert_eq!(doc["report"]["status"], "pass");

    // the vanishing closed-form point
    let out = run(&[
        "verify", "--identity", "RAMANUJAN", "--a", "4", "--b", "0.25", "--q", "0.5", "--z", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));

    // boundary |w| = |q^(1/2) beta| is a domain error: exit 2
    let out = run(&[
        "verify", "--identity", "MAIN1", "--q", "0.25", "--beta", "0.6", "--w", "0.3",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // unknown tag: usage error
    let out = run(&["verify", "--identity", "NOPE", "--q", "0.5", "--beta", "1", "--w", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // the printed confluent statement is reported, never asserted: exit 0
    let out = run(&["verify", "--identity", "LIMIT_MAIN", "--b", "1", "--w", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["status"], "indeterminate");
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = run(&[
        "eval", "h1", "--a", "-0.3", "--c", "1.6", "--z", "i", "--max-terms", "50", "--rtol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn formal_checks_and_source_flag() {
    let out = run(&["formal", "--identity", "MAIN1", "--beta", "2/3", "--w", "1/5", "--order", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["order"], 20);

    // trivial order: constant terms match
    let out = run(&["formal", "--identity", "MAIN1", "--beta", "2/3", "--w", "1/5", "--order", "0"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["formal", "--identity", "JTP", "--z", "2/3", "--order", "14"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["verify", "--identity", "CORO2", "--source"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert!(doc["notes"].as_str().unwrap().contains("fails numerically"));
}

#[test]
fn limit_validation_and_csv() {
    // b must be positive
    let out = run(&["limit", "--b", "0", "--w", "-1", "--k", "3..5"]);
    assert_eq!(out.status.code(), Some(2));
    // w = 1 excluded
    let out = run(&["limit", "--b", "1", "--w", "1", "--k", "3..5"]);
    assert_eq!(out.status.code(), Some(2));
    // a small healthy run, CSV shape
    let out = run(&["limit", "--b", "1", "--w", "-1", "--k", "3..6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,q,lhs_re,lhs_im,rhs_re,rhs_im,ratio_re,ratio_im,lhs_err,rhs_err"
    );
    assert_eq!(lines.count(), 4);
    // JSON route carries the constants section
    let out = run(&["limit", "--b", "1", "--w", "-1", "--k", "3..6", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["rowwise_ratio_ok"], true);
    assert!(doc["table"]["const_printed_ratio"].as_str().unwrap().starts_with("0.2000"));
}

#[test]
fn scan_empty_and_single() {
    let out = run(&["scan", "--identity", "JTP", "--samples", "0", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["outcome"]["summary"]["checks"], 0);

    let out = run(&[
        "scan", "--identity", "RAMANUJAN", "--samples", "2", "--seed", "7", "--q", "0.4",
        "--deterministic",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["outcome"]["summary"]["checks"], 2);
    assert_eq!(doc["outcome"]["summary"]["failures"], 0);
}

#[test]
fn seeded_scan_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("scan1.json");
    let f2 = dir.path().join("scan2.json");
    for f in [&f1, &f2] {
        let out = run(&[
            "scan",
            "--identity",
            "all",
            "--samples",
            "25",
            "--seed",
            "42",
            "--deterministic",
            "--output",
            f.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let b1 = std::fs::read(&f1).unwrap();
    let b2 = std::fs::read(&f2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "reports must be byte-identical");
}

#[test]
fn config_file_and_env_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "prec = 128\nseed = 9\n").unwrap();

    // config applies
    let out = run(&["--config", cfg.to_str().unwrap(), "eval", "qgamma", "--q", "0.5", "--z", "2"]);
    assert_eq!(stdout_json(&out)["precision_bits"], 128);

    // flag beats config
    let out = run(&[
        "--config", cfg.to_str().unwrap(), "--prec", "96", "eval", "qgamma", "--q", "0.5", "--z",
        "2",
    ]);
    assert_eq!(stdout_json(&out)["precision_bits"], 96);

    // env beats the built-in default, flag beats env
    let out = bin()
        .args(["eval", "qgamma", "--q", "0.5", "--z", "2"])
        .env("QBILAT_PREC", "192")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["precision_bits"], 192);
    let out = bin()
        .args(["--prec", "80", "eval", "qgamma", "--q", "0.5", "--z", "2"])
        .env("QBILAT_PREC", "192")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["precision_bits"], 80);

    // unknown config keys are rejected
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "eval", "qgamma", "--q", "0.5", "--z", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
