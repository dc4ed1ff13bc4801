//! End-to-end tests of the `alm` binary: exit codes, output formats and
//! file output.

use std::process::Command;

fn alm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_alm"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn solve_tp4_exits_zero_with_kkt_row() {
    let out = alm(&["solve", "tp4", "--eps", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: kkt"), "{text}");
    assert!(text.lines().next().unwrap().contains("iter-sb"));
}

#[test]
fn solve_tp1_csv_row_zero_is_deterministic() {
    let out = alm(&["solve", "tp1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,f,E1,E2,E3,E4,mu,rho,inner_iters");
    assert_eq!(lines.next().unwrap(), "0,5,7,8,8,48,0.1,1,-");
}

#[test]
fn unknown_problem_exits_two() {
    let out = alm(&["solve", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("unknown problem"));
}

#[test]
fn bad_flag_exits_two() {
    let out = alm(&["solve", "tp1", "--warp-speed", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn iteration_limit_exits_one() {
    let out = alm(&["solve", "tp5", "--max-outer", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: iteration_limit"), "{text}");
}

#[test]
fn json_lines_stream_parses() {
    let out = alm(&["solve", "tp2", "--format", "json-lines"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() > 2);
    for line in &lines[..lines.len() - 1] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("k").is_some(), "record line missing k: {line}");
        assert!(v.get("residuals").is_some());
    }
    let summary: serde_json::Value = serde_json::from_str(lines[lines.len() - 1]).unwrap();
    assert_eq!(summary["status"], "infeasible_stationary");
    assert!(summary["x_final"].is_array());
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join("alm_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tp3.csv");
    let out = alm(&[
        "solve",
        "tp3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("k,f,E1,E2,E3,E4,mu,rho,inner_iters"));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn bench_passes_under_default_config() {
    let out = alm(&["bench"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("PASS  tp1"));
    assert!(text.contains("PASS  tp5"));
    assert!(text.trim_end().ends_with("overall: pass"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn check_audits_derivatives() {
    let out = alm(&["check", "tp4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pass"));

    // audit point override, matching the library-level example at x = 3
    let out = alm(&["check", "tp4", "--at", "3", "--tol", "1e-5"]);
    assert_eq!(out.status.code(), Some(0));

    let out = alm(&["check", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_prints_usage() {
    let out = alm(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("usage: alm"));
}

#[test]
fn solve_with_basic_update_rule_still_terminates() {
    let out = alm(&["solve", "tp1", "--update", "basic", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn newton_inner_solves_tp4() {
    let out = alm(&["solve", "tp4", "--inner", "newton"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: kkt"), "{text}");
}
