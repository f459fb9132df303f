use std::process::{Command, Output};

use bohr_cli::Report;
use bohr_core::certify::Verdict;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bohr-cert"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Report) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    let text = stdout(&o);
    let report: Report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (o.status.code().unwrap(), report)
}

#[test]
fn constants_table_lists_quoted_values() {
    let o = run(&["constants"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for v in ["0.567284", "18.6095", "0.537869", "16.4618", "0.236068", "2.472136"] {
        assert!(text.contains(v), "{v} missing from\n{text}");
    }
}

#[test]
fn constants_json_and_tolerance_stability() {
    let (code, r) = json(&["constants"]);
    assert_eq!(code, 0);
    assert_eq!(r.constants["a1"], 0.567283936817);
    assert_eq!(r.constants["lambda1"], 18.6095490313);
    let (_, coarse) = json(&["constants", "--tol", "1e-6"]);
    for key in ["a1", "a2", "lambda1", "lambda2"] {
        assert!((coarse.constants[key] - r.constants[key]).abs() < 1e-6, "{key}");
    }
}

#[test]
fn json_report_round_trips() {
    let (_, r) = json(&["verify", "--theorem", "2"]);
    let text = serde_json::to_string(&r).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn verify_theorem_1() {
    let (code, r) = json(&["verify", "--theorem", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r.certificates.len(), 5);
    assert!(r.certificates.iter().all(|c| c.verdict == Verdict::Verified));
    assert_eq!(r.verdict, Verdict::Verified);
}

#[test]
fn verify_lambda_override_is_violated() {
    let (code, r) = json(&["verify", "--theorem", "1", "--lambda-override", "18.62"]);
    assert_eq!(code, 1);
    assert_eq!(r.verdict, Verdict::Violated);
    let w = r
        .witnesses
        .iter()
        .find(|w| w.source == "thm1/upper_branch")
        .expect("violation witness");
    assert!((w.t - 0.567284).abs() < 0.01);
    assert!(w.value < 0.0);
}

#[test]
fn verify_theorem_3_lists_coefficient_checks() {
    let (code, r) = json(&["verify", "--theorem", "3"]);
    assert_eq!(code, 0);
    let upper = r.certificates.iter().find(|c| c.target == "thm3/upper_branch").unwrap();
    let coeffs: Vec<f64> = upper.witnesses.iter().take(3).map(|w| w.value).collect();
    assert_eq!(coeffs.len(), 3);
    assert!(coeffs.iter().all(|&c| c < 0.0));
    assert!((coeffs[0] + 0.055728).abs() < 1e-6);
}

#[test]
fn verify_other_theorems() {
    for id in ["A", "B1", "B2", "classical", "2"] {
        let o = run(&["verify", "--theorem", id]);
        assert_eq!(o.status.code(), Some(0), "{id}");
    }
    assert_eq!(run(&["verify", "--theorem", "7"]).status.code(), Some(3));
    let o = run(&["verify", "--theorem", "A", "--lambda-override", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn radius_command() {
    for (id, want) in [("classical", 1.0 / 3.0), ("thmB1", 0.236068), ("thm3", 0.236068)] {
        let (code, r) = json(&["radius", "--functional", id]);
        assert_eq!(code, 0);
        assert!((r.constants["radius"] - want).abs() < 1e-6, "{id}");
    }
    assert_eq!(run(&["radius", "--functional", "nope"]).status.code(), Some(3));
}

fn parse_csv(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.split('\n');
    assert_eq!(lines.next(), Some("t,value"));
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn scan_phi1_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi1.csv");
    let p = path.to_str().unwrap();
    let o = run(&["scan", "--function", "phi1", "--from", "0.3333", "--to", "1", "--step", "0.001", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 668);
    let (t_min, _) = rows.iter().cloned().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!((t_min - 0.5673).abs() < 1e-3, "{t_min}");
    assert_eq!(rows.last().unwrap().0, 1.0);
    // deterministic
    let again = run(&["scan", "--function", "phi1", "--from", "0.3333", "--to", "1", "--step", "0.001"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn scan_bombieri_and_psi1() {
    let o = run(&["scan", "--function", "bombieri", "--from", "0.3334", "--to", "0.7071", "--step", "0.01"]);
    let rows = parse_csv(&stdout(&o));
    assert!((rows[0].1 - 1.0).abs() < 1e-3);
    assert!((rows.last().unwrap().1 - 2f64.sqrt()).abs() < 1e-3);

    let o = run(&["scan", "--function", "psi1", "--from", "0", "--to", "0.3333", "--step", "0.01", "--out", "-"]);
    let rows = parse_csv(&stdout(&o));
    assert!(rows.windows(2).all(|w| w[1].1 > w[0].1));
}

#[test]
fn scan_unwritable_path() {
    let o = run(&["scan", "--function", "phi1", "--from", "0.4", "--to", "0.5", "--step", "0.1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sample_commands() {
    let (code, r) = json(&["sample", "--functional", "thm1", "--trials", "10000", "--degree", "5", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(r.min_slack.unwrap() >= 0.0);

    let (code, r) = json(&["sample", "--functional", "thm1", "--trials", "100", "--degree", "0", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(r.min_slack.unwrap().abs() < 1e-12);

    let o = run(&["sample", "--functional", "thm3", "--trials", "1000", "--degree", "3", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["sample", "--functional", "thm1", "--trials", "0"]).status.code(), Some(3));
}

#[test]
fn sample_is_seed_deterministic() {
    let args = ["sample", "--functional", "all", "--trials", "200", "--seed", "9"];
    let (_, a) = json(&args);
    let (_, b) = json(&args);
    assert_eq!(a.min_slack, b.min_slack);
    assert_eq!(a.witnesses, b.witnesses);
    let single = bin().args(args).arg("--json").env("BOHR_CERT_THREADS", "1").output().unwrap();
    let c: Report = serde_json::from_slice(&single.stdout).unwrap();
    assert_eq!(a.witnesses, c.witnesses);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["constants", "--bogus"]).status.code(), Some(3));
    assert_eq!(run(&[]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["constants", "--tol", "-1"]).status.code(), Some(3));
    let o = bin().arg("constants").env("BOHR_CERT_THREADS", "x").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_mode_has_no_mixed_output() {
    let o = run(&["constants", "--json"]);
    let text = stdout(&o);
    assert!(text.trim_start().starts_with('{'));
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
}
