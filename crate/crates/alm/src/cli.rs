//! Command-line front end: `solve`, `bench` and `check` subcommands over
//! the registered problems.
//!
//! Exit codes: 0 when the solver reports a mathematically meaningful
//! terminus (or all bench/check tests pass), 1 for resource and parameter
//! failures, 2 for usage errors.

use crate::bench::{get_problem, run_reference_suite};
use crate::error::Error;
use crate::inner::InnerMethod;
use crate::nlp::finite_diff_check;
use crate::outer::{solve, OuterConfig, SolveResult, TerminationStatus, UpdateRule};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

pub const USAGE: &str = "\
usage: alm <command> [options]

commands:
  solve <problem>   run the solver on a registered problem
  bench             reproduce the five reference problems and grade them
  check <problem>   audit analytic derivatives against finite differences

solve options:
  --mu0 <v>             initial smoothing parameter      (default 0.1)
  --rho0 <v>            initial penalty parameter        (default 1)
  --eps <v>             termination tolerance            (default 1e-8)
  --max-outer <n>       outer iteration cap              (default 200)
  --update <rule>       basic | adaptive                 (default adaptive)
  --inner <method>      bfgs | newton                    (default bfgs)
  --sigma <v>           Armijo constant                  (default 1e-4)
  --backtrack <v>       step reduction factor            (default 0.5)
  --max-inner <n>       per-subproblem iteration cap     (default 100)
  --min-step <v>        smallest line-search step        (default 1e-16)
  --no-warm-start       reset the quasi-Newton matrix per subproblem
  --rho-cap <v>         penalty overflow guard           (default 1e30)
  --singular-tol <v>    singular/infeasible split        (default 100*eps)
  --format <fmt>        table | csv | json-lines         (default table)
  --output <path>       write output to a file instead of stdout

bench options: the solve parameter overrides above

check options:
  --tol <v>             pass threshold                   (default 1e-5)
  --at <v1,v2,...>      audit point                      (default x0)

problems: tp1 tp2 tp3 tp4 tp5
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    JsonLines,
}

#[derive(Debug)]
pub enum Command {
    Solve {
        problem: String,
        config: OuterConfig,
        format: OutputFormat,
        output: Option<PathBuf>,
    },
    Bench {
        config: OuterConfig,
    },
    Check {
        problem: String,
        tol: f64,
        at: Option<Vec<f64>>,
    },
}

#[derive(Debug)]
pub struct Invocation {
    pub command: Command,
}

/// Final line of the json-lines stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: TerminationStatus,
    pub x_final: Vec<f64>,
    pub s_final: Vec<f64>,
    pub lambda_final: Option<Vec<f64>>,
}

fn parse_value<T: std::str::FromStr>(flag: &str, value: Option<&String>) -> Result<T, String> {
    let raw = value.ok_or_else(|| format!("missing value for {flag}"))?;
    raw.parse()
        .map_err(|_| format!("invalid value `{raw}` for {flag}"))
}

/// Parses argv (without the program name) into an invocation. Errors carry
/// the usage complaint.
pub fn parse_args(args: &[String]) -> Result<Invocation, String> {
    let mut it = args.iter();
    let command = it.next().ok_or_else(|| "missing command".to_string())?;

    match command.as_str() {
        "solve" | "bench" => {
            let mut problem: Option<String> = None;
            let mut config = OuterConfig::default();
            let mut eps_given = false;
            let mut singular_given = false;
            let mut format = OutputFormat::Table;
            let mut output = None;
            while let Some(arg) = it.next() {
                match arg.as_str() {
                    "--mu0" => config.mu0 = parse_value(arg, it.next())?,
                    "--rho0" => config.rho0 = parse_value(arg, it.next())?,
                    "--eps" => {
                        config.eps = parse_value(arg, it.next())?;
                        eps_given = true;
                    }
                    "--max-outer" => config.max_outer = parse_value(arg, it.next())?,
                    "--rho-cap" => config.rho_cap = parse_value(arg, it.next())?,
                    "--singular-tol" => {
                        config.singular_tol = parse_value(arg, it.next())?;
                        singular_given = true;
                    }
                    "--update" => {
                        config.update_rule = match it.next().map(String::as_str) {
                            Some("basic") => UpdateRule::Basic,
                            Some("adaptive") => UpdateRule::Adaptive,
                            other => {
                                return Err(format!(
                                    "--update expects basic|adaptive, got {other:?}"
                                ))
                            }
                        }
                    }
                    "--inner" => {
                        config.inner.method = match it.next().map(String::as_str) {
                            Some("bfgs") | Some("quasi-newton") => InnerMethod::QuasiNewton,
                            Some("newton") => InnerMethod::Newton,
                            other => {
                                return Err(format!("--inner expects bfgs|newton, got {other:?}"))
                            }
                        }
                    }
                    "--sigma" => config.inner.sigma = parse_value(arg, it.next())?,
                    "--backtrack" => config.inner.backtrack = parse_value(arg, it.next())?,
                    "--max-inner" => config.inner.max_iters = parse_value(arg, it.next())?,
                    "--min-step" => config.inner.min_step = parse_value(arg, it.next())?,
                    "--no-warm-start" => config.inner.warm_start_b = false,
                    "--format" => {
                        format = match it.next().map(String::as_str) {
                            Some("table") => OutputFormat::Table,
                            Some("csv") => OutputFormat::Csv,
                            Some("json-lines") | Some("jsonl") => OutputFormat::JsonLines,
                            other => {
                                return Err(format!(
                                    "--format expects table|csv|json-lines, got {other:?}"
                                ))
                            }
                        }
                    }
                    "--output" => {
                        output = Some(PathBuf::from(
                            it.next()
                                .ok_or_else(|| "missing value for --output".to_string())?,
                        ))
                    }
                    other if !other.starts_with("--") && problem.is_none() => {
                        problem = Some(other.to_string());
                    }
                    other => return Err(format!("unexpected argument `{other}`")),
                }
            }
            if eps_given && !singular_given {
                config.singular_tol = 100.0 * config.eps;
            }
            config.validate().map_err(|e| e.to_string())?;
            if command == "bench" {
                if let Some(p) = problem {
                    return Err(format!("unexpected argument `{p}` for bench"));
                }
                Ok(Invocation {
                    command: Command::Bench { config },
                })
            } else {
                let problem = problem.ok_or_else(|| "solve requires a problem name".to_string())?;
                Ok(Invocation {
                    command: Command::Solve {
                        problem,
                        config,
                        format,
                        output,
                    },
                })
            }
        }
        "check" => {
            let mut problem: Option<String> = None;
            let mut tol = 1e-5;
            let mut at = None;
            while let Some(arg) = it.next() {
                match arg.as_str() {
                    "--tol" => tol = parse_value(arg, it.next())?,
                    "--at" => {
                        let raw = it
                            .next()
                            .ok_or_else(|| "missing value for --at".to_string())?;
                        let parsed: Result<Vec<f64>, _> =
                            raw.split(',').map(|v| v.trim().parse()).collect();
                        at = Some(parsed.map_err(|_| format!("invalid point `{raw}` for --at"))?);
                    }
                    other if !other.starts_with("--") && problem.is_none() => {
                        problem = Some(other.to_string());
                    }
                    other => return Err(format!("unexpected argument `{other}`")),
                }
            }
            let problem = problem.ok_or_else(|| "check requires a problem name".to_string())?;
            Ok(Invocation {
                command: Command::Check { problem, tol, at },
            })
        }
        "--help" | "-h" | "help" => Err(String::new()),
        other => Err(format!("unknown command `{other}`")),
    }
}

/// Table-view numeric formatting: four decimal places in the plain range,
/// scientific outside it.
fn fmt4(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e5 {
        format!("{v:.4}")
    } else {
        format!("{v:.4e}")
    }
}

pub fn write_table(result: &SolveResult, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "{:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "k", "f", "E1", "E2", "E3", "E4", "mu", "rho", "iter-sb"
    )?;
    for r in &result.history {
        let iters = if r.k == 0 {
            "-".to_string()
        } else {
            r.inner_iters.to_string()
        };
        writeln!(
            w,
            "{:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
            r.k,
            fmt4(r.f_val),
            fmt4(r.residuals.e1),
            fmt4(r.residuals.e2),
            fmt4(r.residuals.e3),
            fmt4(r.residuals.e4),
            fmt4(r.mu),
            fmt4(r.rho),
            iters
        )?;
    }
    writeln!(w, "status: {}", result.status)?;
    writeln!(w, "x:      {:?}", result.x_final)?;
    writeln!(w, "s:      {:?}", result.s_final)?;
    if let Some(lambda) = &result.lambda_final {
        writeln!(w, "lambda: {lambda:?}")?;
    }
    writeln!(w, "f:      {}", result.final_f())?;
    Ok(())
}

pub fn write_csv(result: &SolveResult, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "k,f,E1,E2,E3,E4,mu,rho,inner_iters")?;
    for r in &result.history {
        let iters = if r.k == 0 {
            "-".to_string()
        } else {
            r.inner_iters.to_string()
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.k,
            r.f_val,
            r.residuals.e1,
            r.residuals.e2,
            r.residuals.e3,
            r.residuals.e4,
            r.mu,
            r.rho,
            iters
        )?;
    }
    Ok(())
}

pub fn write_json_lines(result: &SolveResult, w: &mut impl Write) -> std::io::Result<()> {
    for r in &result.history {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(w, "{line}")?;
    }
    let summary = Summary {
        status: result.status,
        x_final: result.x_final.clone(),
        s_final: result.s_final.clone(),
        lambda_final: result.lambda_final.clone(),
    };
    writeln!(
        w,
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    )?;
    Ok(())
}

pub fn write_solve_output(
    result: &SolveResult,
    format: OutputFormat,
    w: &mut impl Write,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Table => write_table(result, w),
        OutputFormat::Csv => write_csv(result, w),
        OutputFormat::JsonLines => write_json_lines(result, w),
    }
}

fn exit_code_for(status: TerminationStatus) -> i32 {
    if status.is_solved() {
        0
    } else {
        1
    }
}

/// Executes a parsed invocation, writing normal output to `out` and
/// diagnostics to `err`.
pub fn run(inv: &Invocation, out: &mut impl Write, err: &mut impl Write) -> i32 {
    match &inv.command {
        Command::Solve {
            problem,
            config,
            format,
            output,
        } => {
            let problem = match get_problem(problem) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            let result = match solve(&problem, config) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 1;
                }
            };
            let written = match output {
                Some(path) => std::fs::File::create(path)
                    .and_then(|mut f| write_solve_output(&result, *format, &mut f)),
                None => write_solve_output(&result, *format, out),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            exit_code_for(result.status)
        }
        Command::Bench { config } => match run_reference_suite(config) {
            Ok(reports) => {
                let mut all = true;
                for report in &reports {
                    let _ = write!(out, "{report}");
                    all &= report.passed();
                }
                let _ = writeln!(out, "overall: {}", if all { "pass" } else { "FAIL" });
                if all {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Command::Check { problem, tol, at } => {
            let problem = match get_problem(problem) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            };
            let x = at.clone().unwrap_or_else(|| problem.x0().to_vec());
            match finite_diff_check(&problem, &x, *tol) {
                Ok(report) => {
                    let _ = writeln!(out, "{} at {:?}", problem.name(), x);
                    let _ = writeln!(out, "{report}");
                    if report.passed() {
                        0
                    } else {
                        1
                    }
                }
                Err(e @ Error::Dimension { .. }) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    1
                }
            }
        }
    }
}

/// Entry point for the binary: parses `std::env::args`, runs, returns the
/// exit code.
pub fn main_from_env() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    match parse_args(&args) {
        Ok(inv) => run(&inv, &mut out, &mut err),
        Err(msg) => {
            if msg.is_empty() {
                let _ = write!(out, "{USAGE}");
                0
            } else {
                let _ = writeln!(err, "error: {msg}");
                let _ = write!(err, "{USAGE}");
                2
            }
        }
    }
}
