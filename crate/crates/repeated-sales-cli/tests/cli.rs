//! End-to-end tests of the command-line interface: output schemas, exit
//! codes, reproducibility and the documented golden values.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repeated-sales"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    let text = String::from_utf8_lossy(&output.stdout);
    let start = text
        .find('{')
        .unwrap_or_else(|| panic!("no JSON in output: {text}"));
    serde_json::from_str(&text[start..]).expect("valid JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("repeated-sales-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn solve_two_round_defaults_to_uniform() {
    let out = run(&["solve-two-round"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert!((json["p1"].as_f64().unwrap() - 0.3).abs() < 1e-6);
    assert!((json["t1"].as_f64().unwrap() - 0.6).abs() < 1e-6);
    assert!((json["revenue"].as_f64().unwrap() - 0.45).abs() < 1e-6);
    assert_eq!(json["p1_equals_lower_support"], Value::Bool(false));
    assert_eq!(json["manifest"]["subcommand"], "solve-two-round");
}

#[test]
fn solve_two_round_reads_a_distribution_file() {
    let path = temp_path("upper-uniform.json");
    std::fs::write(&path, r#"{"type":"uniform","low":0.5,"high":1.0}"#).unwrap();
    let out = run(&["solve-two-round", "--dist", path.to_str().unwrap()]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["p1_equals_lower_support"], Value::Bool(true));
    assert!((json["revenue"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    std::fs::remove_file(&path).ok();
}

#[test]
fn invalid_distribution_exits_with_code_3() {
    let path = temp_path("bad-dist.json");
    std::fs::write(&path, r#"{"type":"gaussian","mu":0}"#).unwrap();
    let out = run(&["solve-two-round", "--dist", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_file(&path).ok();
}

#[test]
fn solve_finite_prints_the_recursion_csv() {
    let out = run(&["solve-finite", "--n", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: "));
    assert_eq!(lines.next().unwrap(), "n,p,t,R,u,residual");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let row2: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(row2[0], "2");
    assert!((row2[3].parse::<f64>().unwrap() - 0.45).abs() < 1e-9);
    assert!(
        !row2[5].is_empty(),
        "uniform rows carry the residual column"
    );
}

#[test]
fn solve_finite_power_law_leaves_residual_empty() {
    let out = run(&["solve-finite", "--n", "2", "--power-law", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with(','), "no residual for power laws: {last}");
}

#[test]
fn solve_infinite_single_delta() {
    let out = run(&["solve-infinite", "--delta", "1.0"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["t"].as_f64().unwrap(), 0.5);
    assert_eq!(json["ratio"].as_f64().unwrap(), 1.0);
}

#[test]
fn solve_infinite_sweep_writes_csv() {
    let path = temp_path("sweep.csv");
    let out = run(&[
        "solve-infinite",
        "--sweep",
        "0.0001:1.0:10",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let ratios: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 10);
    for pair in ratios.windows(2) {
        assert!(pair[0] <= pair[1] + 1e-9, "ratio not monotone in delta");
    }
    assert!(ratios[0] > 0.686 && ratios[0] < 0.687);
    std::fs::remove_file(&path).ok();
}

#[test]
fn simulate_two_round_quadrature_matches_the_solver() {
    let out = run(&["simulate", "--game", "two-round", "--transcript", "v=0.7"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert!((json["revenue"].as_f64().unwrap() - 0.45).abs() < 1e-6);
    let rounds = json["transcript"]["rounds"].as_array().unwrap();
    assert_eq!(rounds.len(), 2);
    assert_eq!(rounds[0]["action"], "accept");
    assert_eq!(rounds[1]["action"], "accept");
}

#[test]
fn simulate_zero_commitment_is_zero() {
    let out = run(&["simulate", "--game", "infinite-zero", "--delta", "0.3"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["revenue"].as_f64().unwrap(), 0.0);
}

#[test]
fn simulate_monte_carlo_respects_the_seed_env() {
    let args = [
        "simulate",
        "--game",
        "infinite-partial",
        "--delta",
        "0.5",
        "--method",
        "mc",
        "--samples",
        "20000",
    ];
    let a = bin()
        .args(args)
        .env("REPEATED_SALES_SEED", "1")
        .output()
        .unwrap();
    let b = bin()
        .args(args)
        .env("REPEATED_SALES_SEED", "1")
        .output()
        .unwrap();
    let c = bin()
        .args(args)
        .env("REPEATED_SALES_SEED", "2")
        .output()
        .unwrap();
    let value = |o: &Output| stdout_json(o)["revenue"].as_f64().unwrap();
    assert_eq!(value(&a), value(&b), "same seed, same estimate");
    assert_ne!(value(&a), value(&c), "different seed, different estimate");
}

#[test]
fn verify_passes_the_equilibrium_and_rejects_the_perturbation() {
    let ok = run(&[
        "verify",
        "--game",
        "two-round",
        "--value-grid",
        "300",
        "--price-grid",
        "500",
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let json = stdout_json(&ok);
    assert_eq!(json["all_pass"], Value::Bool(true));

    let bad = run(&[
        "verify",
        "--game",
        "two-round",
        "--perturb",
        "root-price=0.05",
        "--value-grid",
        "300",
        "--price-grid",
        "500",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let json = stdout_json(&bad);
    assert_eq!(json["all_pass"], Value::Bool(false));
}

#[test]
fn verify_rejects_out_of_domain_delta_with_code_3() {
    let out = run(&["verify", "--game", "infinite-zero", "--delta", "0.6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_threshold_existence_flags() {
    let dist = temp_path("upper-dist.json");
    std::fs::write(&dist, r#"{"type":"uniform","low":0.5,"high":1.0}"#).unwrap();
    let csv = temp_path("exists.csv");
    let out = run(&[
        "sweep",
        "--parameter",
        "n",
        "--game",
        "threshold-exists",
        "--range",
        "3:6:4",
        "--dist",
        dist.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let data: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(data.len(), 4);
    for line in data {
        assert!(line.ends_with(",true"), "existence flag missing in {line}");
    }
    std::fs::remove_file(&dist).ok();
    std::fs::remove_file(&csv).ok();
}

#[test]
fn report_prints_human_summary_and_json() {
    let out = run(&["report", "--game", "two-round"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("opening price p1"));
    let json = stdout_json(&out);
    assert!((json["p1"].as_f64().unwrap() - 0.3).abs() < 1e-6);
    assert!((json["revenue"].as_f64().unwrap() - 0.45).abs() < 1e-6);

    let zero = run(&["report", "--game", "infinite-zero", "--delta", "0.5"]);
    let json = stdout_json(&zero);
    assert_eq!(json["revenue"].as_f64().unwrap(), 0.0);
}

#[test]
fn reruns_are_identical_modulo_timestamp() {
    let a = stdout_json(&run(&["solve-two-round"]));
    let b = stdout_json(&run(&["solve-two-round"]));
    let strip = |mut v: Value| {
        v["manifest"]["timestamp_unix"] = Value::Null;
        v
    };
    assert_eq!(strip(a), strip(b));
}
