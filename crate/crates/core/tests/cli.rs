use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entropik"))
        .args(args)
        .env_remove("ENTROPIK_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cases: [&[&str]; 6] = [
        &["degrees", "--q", "5", "--nmax", "6"],
        &["degrees", "--pattern", "c", "--q", "5", "--nmax", "3", "--granularity", "half"],
        &["surface", "--q", "7", "--nmax", "4", "--lemma"],
        &["recurrence", "--q", "9", "--nmax", "20"],
        &["probe", "--q", "5", "--iters", "4"],
        &["genfun", "--terms", "1,4,8,12,16,20,24,28,32"],
    ];
    for args in cases {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn degrees_feed_the_fraction_fit() {
    let deg = json(&run(&["degrees", "--q", "4", "--nmax", "10"]));
    let terms: Vec<String> = deg["degrees"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
    let gf = json(&run(&["genfun", "--terms", &terms.join(",")]));
    assert_eq!(gf["stable"], true);
    assert_eq!(gf["numerator"], serde_json::json!([1, 2, 1]));
    assert_eq!(gf["denominator"], serde_json::json!([1, -2, 1]));
    assert_eq!(gf["growth_order"], 1);
}

#[test]
fn fit_from_file_and_unstable_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degrees.json");
    let out = run(&["degrees", "--q", "6", "--nmax", "7", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let gf = json(&run(&["genfun", "--from", path.to_str().unwrap()]));
    assert_eq!(gf["stable"], true);
    assert!((gf["lambda"].as_f64().unwrap() - 4.0).abs() < 1e-9);

    let out = run(&["genfun", "--terms", "1,9,69,481,3309"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["stable"], false);
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn prime_recurrence_reports_complexity() {
    let v = json(&run(&["recurrence", "--q", "7"]));
    assert!((v["lambda"].as_f64().unwrap() - 6.854101966249685).abs() < 1e-12, "{v}");
    assert_eq!(v["companion_has_quadratic_factor"], true);
    assert!(v["balance_violations"].as_array().unwrap().is_empty());
}

#[test]
fn cyclic_probe_tracks_complexity() {
    let v = json(&run(&["probe", "--pattern", "c", "--q", "6", "--iters", "4"]));
    let lambda = v["lambda"].as_f64().unwrap();
    assert!((lambda - 13.93).abs() < 0.05, "{lambda}");
    assert_eq!(v["iters_completed"], 4);
}

#[test]
fn precondition_failures_exit_two_with_json_error() {
    let out = run(&["recurrence", "--q", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["exit_code"], 2);
    assert!(err["error"]["message"].as_str().unwrap().contains('8'));

    let out = run(&["degrees", "--q", "5", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    assert_eq!(run(&["degrees", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["degrees", "--pattern", "custom", "--q", "5"]).status.code(), Some(2));
}

#[test]
fn resource_cap_exits_four() {
    let out = run(&["probe", "--q", "7", "--iters", "6", "--max-bits", "1000"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["surface", "--q", "5", "--nmax", "6", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["q"], 5);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let v = json(&run(&["degrees", "--q", "4", "--nmax", "3"]));
    assert_eq!(v["seed"], 1);
    let out = Command::new(env!("CARGO_BIN_EXE_entropik"))
        .args(["degrees", "--q", "4", "--nmax", "3"])
        .env("ENTROPIK_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 42);
    let out = Command::new(env!("CARGO_BIN_EXE_entropik"))
        .args(["--seed", "7", "degrees", "--q", "4", "--nmax", "3"])
        .env("ENTROPIK_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 7);
}

#[test]
fn csv_and_pretty_formats() {
    let out = run(&["--out", "csv", "degrees", "--q", "4", "--nmax", "3"]);
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let header = rdr.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "seed"));
    assert_eq!(rdr.records().count(), 4);

    let out = run(&["--out", "pretty", "degrees", "--q", "4", "--nmax", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(seed 1)"));
    assert!(text.contains("12"));
}

#[test]
fn verify_passes_for_small_primes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
