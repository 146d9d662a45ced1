use std::f64::consts::{E, PI};
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use phasenoise_cli::{verify, Settings, VerifyOptions};
use phasenoise_core::stochastic::{closed_form_moments, ZMoments};

fn phasenoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasenoise")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = phasenoise(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasenoise-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn help_lists_every_flag() {
    let help = stdout(&["bounds", "--help"]);
    for flag in [
        "--gamma", "--snr", "--alpha", "--L", "--delta", "--t", "--a", "--nu", "--zeta", "--samples",
        "--inner-steps", "--workers", "--chunk-size", "--seed", "--out", "--bits", "--config",
    ] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    let top = stdout(&["--help"]);
    for cmd in ["moments", "bounds", "mc", "sweep", "prelog", "verify"] {
        assert!(top.contains(cmd));
    }
}

#[test]
fn unknown_flags_and_bad_values_fail() {
    assert!(!phasenoise(&["bounds", "--frobnicate", "1"]).status.success());
    assert!(!phasenoise(&["bounds", "--snr", "abc"]).status.success());
    assert!(!phasenoise(&["prelog", "--alpha", "0.5:0.1:0.1"]).status.success());
    assert!(!phasenoise(&["bounds", "--alpha", "0.5", "--delta", "0.1"]).status.success());
}

#[test]
fn prelog_curve_rows() {
    let text = stdout(&["prelog"]);
    assert_eq!(text.lines().count(), 100);
    assert!(!text.contains('\r'));
    let text = stdout(&["prelog", "--alpha", "0.3333333333333333,0.5"]);
    let row = |i: usize| -> Vec<f64> { text.lines().nth(i).unwrap().split(',').map(|x| x.parse().unwrap()).collect() };
    let third = row(1);
    assert!((third[1] - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(third[2], 0.5);
    assert!((third[3] - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(row(2)[1], 0.75);
}

#[test]
fn bounds_row_matches_amplitude_constant_and_is_reproducible() {
    let dir = scratch("bounds");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let args = |out: &PathBuf| {
        vec!["bounds".to_string(), "--gamma".into(), "1".into(), "--snr".into(), "1e6".into(), "--alpha".into(), "0.5".into(), "--out".into(), out.display().to_string()]
    };
    for path in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_phasenoise")).args(args(path)).output().unwrap();
        assert!(out.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let i_amp: f64 = column(&text, "i_amp")[0].parse().unwrap();
    let gap = i_amp - 0.5 * 1e6f64.ln();
    assert!((gap + 0.5 * (4.0 * PI * E).ln()).abs() < 0.15, "{gap}");
    assert_eq!(column(&text, "L")[0], "1000");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn infeasible_rows_are_skipped_with_reason() {
    let out = phasenoise(&["bounds", "--delta", "0.1", "--snr", "50,1e3", "--t", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let reasons = column(&text, "reason");
    assert!(reasons[0].contains("infeasible"));
    assert!(reasons[1].is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let conf = dir.join("run.conf");
    fs::write(&conf, "# reference point\ngamma = 1\nsnr = 1e4\nalpha = 0.25, 0.5\n").unwrap();
    let conf = conf.display().to_string();
    let from_file = stdout(&["bounds", "--config", &conf]);
    assert_eq!(column(&from_file, "snr").len(), 2);
    let overridden = stdout(&["bounds", "--config", &conf, "--snr", "1e6"]);
    let snr: f64 = column(&overridden, "snr")[0].parse().unwrap();
    assert_eq!(snr, 1e6);

    fs::write(dir.join("bad.conf"), "snr = 1e4\nwidth = 3\n").unwrap();
    let bad = phasenoise(&["bounds", "--config", &dir.join("bad.conf").display().to_string()]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("width"));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_passes_on_a_healthy_build() {
    let out = phasenoise(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.contains("k_golden: expected 8.1353, got 8.13"));
    assert!(text.contains(", tol 0.01"));
}

fn wrong_moments(alpha: f64) -> phasenoise_core::Result<ZMoments> {
    let z = closed_form_moments(alpha)?;
    // halves the deficit 1 − m2
    Ok(ZMoments { m2: 1.0 + (z.m2 - 1.0) * 0.5, ..z })
}

#[test]
fn verify_flags_an_injected_moment_error() {
    let mut s = Settings::default();
    s.set("samples", "20000").unwrap();
    let report = verify(&s, &VerifyOptions { moments: wrong_moments });
    assert!(!report.passed());
    let failed = report.failures();
    assert!(failed.contains(&"moment_m2"), "{failed:?}");
    assert!(failed.iter().any(|f| f.starts_with("var_g_scaling")), "{failed:?}");
}
