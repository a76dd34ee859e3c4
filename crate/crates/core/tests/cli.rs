use std::process::Command;

use hhverify::cli::{run_with, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED};
use hhverify::report::CSV_HEADER;
use hhverify::verify::{InequalityReport, SearchResult, SweepSummary, Verdict};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    run_seeded(args, None)
}

fn run_seeded(args: &[&str], seed: Option<&str>) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hhverify").chain(args.iter().copied());
    let code = run_with(argv, seed, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn equality_case_exits_zero() {
    let r = run(&["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--m", "1", "--alpha", "1", "--theorem", "eq4"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report: InequalityReport = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report.verdict, Verdict::Holds);
    assert!(report.margin.unwrap().abs() < 1e-8);
}

#[test]
fn printed_counterexample_exits_one() {
    let r = run(&["check", "--f", "0.5", "--a", "0", "--b", "1", "--m", "1", "--theorem", "eq22", "--variant", "printed"]);
    assert_eq!(r.code, EXIT_VIOLATED);
    let report: InequalityReport = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report.verdict, Verdict::Violated);
    assert!((report.margin.unwrap() + 0.25).abs() < 1e-12);
}

#[test]
fn unknown_theorem_is_a_usage_error() {
    let r = run(&["check", "--theorem", "bogus"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stdout.is_empty());
}

#[test]
fn usage_errors() {
    for args in [
        &["check", "--f", "exp(", "--a", "0", "--b", "1"][..],
        &["check", "--f", "exp(x)", "--a", "1", "--b", "0"],
        &["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--m", "1.5"],
        &["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--tol", "0"],
        &["check", "--a", "0", "--b", "1"],
        &["check", "--family", "exp_linear", "--fparam", "q=1", "--a", "0", "--b", "1"],
        &["sweep", "--family", "nope", "--a", "0", "--b", "1"],
        &["sweep", "--family", "const", "--fparam", "c=1:2", "--a", "0", "--b", "1"],
        &["search", "--family", "const", "--fparam", "c=0.1:1", "--a", "0", "--b", "1", "--theorem", "eq4", "--budget", "0"],
        &["frobnicate"],
    ] {
        let r = run(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).code, EXIT_OK);
    assert_eq!(run(&["--version"]).code, EXIT_OK);
}

#[test]
fn json_round_trips() {
    let r = run(&["check", "--f", "exp(x^2)", "--a", "0.2", "--b", "1.3", "--m", "0.7", "--alpha", "0.6", "--theorem", "eq31"]);
    let report: InequalityReport = serde_json::from_str(&r.stdout).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, r.stdout);
    assert_eq!(report.replay_verdict(), report.verdict);
}

#[test]
fn csv_sweep_has_header_and_one_row_per_point() {
    let r = run(&[
        "sweep", "--family", "exp_affine", "--fparam", "c=0.5:1.5:3", "--fparam", "k=2", "--a", "0", "--b", "1", "--m",
        "0.5,1", "--theorem", "eq4", "--format", "csv",
    ]);
    assert_eq!(r.code, EXIT_VIOLATED, "c=1.5 with m=0.5 falls outside the hypothesis and fails");
    let mut reader = csv::Reader::from_reader(r.stdout.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let lhs = &row[7];
        assert!(lhs.contains('e'), "{lhs}");
        let mantissa = lhs.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{lhs}");
    }
}

#[test]
fn sweep_json_summary() {
    let r = run(&["sweep", "--family", "const", "--fparam", "c=0.25:1:4", "--a", "0,0.5", "--b", "1", "--m", "0.5,1", "--alpha", "0.5,1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let summary: SweepSummary = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(summary.reports.len(), 4 * 2 * 2 * 2 * 7);
    assert_eq!(summary.counts.violated, 0);
}

#[test]
fn search_finds_the_constant_counterexample() {
    let r = run(&[
        "search", "--family", "const", "--fparam", "c=0.1:1", "--a", "0", "--b", "1", "--theorem", "eq22", "--variant",
        "printed",
    ]);
    assert_eq!(r.code, EXIT_VIOLATED);
    let result: SearchResult = serde_json::from_str(&r.stdout).unwrap();
    assert!((result.best_margin.unwrap() + 0.25).abs() < 1e-3);
    assert!(result.evaluations <= 200);
}

#[test]
fn classify_exit_codes() {
    let pass = run(&["classify", "--f", "exp(x)", "--upper", "2", "--m", "0.5"]);
    assert_eq!(pass.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&pass.stdout).unwrap();
    assert_eq!(v["label"], "sampled certificate");
    let fail = run(&["classify", "--f", "x^2+1", "--upper", "2"]);
    assert_eq!(fail.code, EXIT_VIOLATED);
    let v: serde_json::Value = serde_json::from_str(&fail.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert!(v["worst_violation"]["deficit"].as_f64().unwrap() > 0.0);
}

#[test]
fn chain_output() {
    let r = run(&["chain", "--f", "exp(x)", "--a", "0", "--b", "1", "--which", "dr1"]);
    assert_eq!(r.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["chain"]["terms"].as_array().unwrap().len(), 3);
    assert_eq!(v["report"]["verdict"], "holds");
}

#[test]
fn seed_override() {
    let args = ["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--theorem", "eq4"];
    assert_eq!(run_seeded(&args, Some("12345")).code, EXIT_OK);
    assert_eq!(run_seeded(&args, Some("twelve")).code, EXIT_USAGE);
}

#[test]
fn writes_to_file_and_reports_unwritable_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let r = run(&["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--theorem", "eq4", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    let report: InequalityReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.verdict, Verdict::Holds);

    let bad = dir.path().join("missing").join("report.json");
    let r = run(&["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--theorem", "eq4", "--out", bad.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_INCONCLUSIVE);
    assert!(r.stderr.contains("cannot write"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_hhverify");
    let ok = Command::new(bin).args(["check", "--f", "exp(x)", "--a", "0", "--b", "1", "--theorem", "eq4"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin).args(["check", "--theorem", "bogus"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let seeded = Command::new(bin)
        .env("HH_SEED", "not-a-number")
        .args(["check", "--f", "exp(x)", "--a", "0", "--b", "1"])
        .output()
        .unwrap();
    assert_eq!(seeded.status.code(), Some(EXIT_USAGE));
}
