//! The five benchmark problems and their reference outcomes.
//!
//! TP1–TP3 are infeasible instances used to watch the stationarity
//! residual of the violation measure collapse; TP4 is a well-posed
//! single-variable problem with a KKT solution that defeats naive SQP
//! starts; TP5 (Hock–Schittkowski 13) has a minimizer at which the active
//! constraint gradients are linearly dependent, so no KKT multipliers
//! exist and the run must end at a singular stationary point.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nlp::{eval_residuals, Problem};
use crate::outer::{solve, OuterConfig, SolveResult, TerminationStatus};

fn tp1() -> Problem {
    Problem::new(
        "tp1",
        2,
        2,
        vec![3.0, 2.0],
        |x| x[0] + x[1],
        |_| vec![1.0, 1.0],
        |x| vec![x[1] - x[0] * x[0] - 1.0, 0.3 * (1.0 - x[1].exp())],
        |x| Matrix::from_rows(&[&[-2.0 * x[0], 0.0], &[1.0, -0.3 * x[1].exp()]]),
    )
    .with_objective_hessian(|_| Matrix::zeros(2, 2))
    .with_constraint_hessians(|x, i| match i {
        0 => Matrix::from_rows(&[&[-2.0, 0.0], &[0.0, 0.0]]),
        _ => Matrix::from_rows(&[&[0.0, 0.0], &[0.0, -0.3 * x[1].exp()]]),
    })
}

fn tp2() -> Problem {
    Problem::new(
        "tp2",
        2,
        4,
        vec![3.0, 2.0],
        |x| x[0] + x[1],
        |_| vec![1.0, 1.0],
        |x| {
            vec![
                -x[0] * x[0] + x[1] - 1.0,
                -x[0] * x[0] - x[1] - 1.0,
                x[0] - x[1] * x[1] - 1.0,
                -x[0] - x[1] * x[1] - 1.0,
            ]
        },
        |x| {
            Matrix::from_rows(&[
                &[-2.0 * x[0], -2.0 * x[0], 1.0, -1.0],
                &[1.0, -1.0, -2.0 * x[1], -2.0 * x[1]],
            ])
        },
    )
    .with_objective_hessian(|_| Matrix::zeros(2, 2))
    .with_constraint_hessians(|_, i| match i {
        0 | 1 => Matrix::from_rows(&[&[-2.0, 0.0], &[0.0, 0.0]]),
        _ => Matrix::from_rows(&[&[0.0, 0.0], &[0.0, -2.0]]),
    })
}

fn tp3() -> Problem {
    Problem::new(
        "tp3",
        2,
        3,
        vec![-20.0, 10.0],
        |x| x[0],
        |_| vec![1.0, 0.0],
        |x| {
            vec![
                0.5 * (-x[0] - x[1] * x[1] - 1.0),
                x[0] - x[1] * x[1],
                -x[0] + x[1] * x[1],
            ]
        },
        |x| Matrix::from_rows(&[&[-0.5, 1.0, -1.0], &[-x[1], -2.0 * x[1], 2.0 * x[1]]]),
    )
    .with_objective_hessian(|_| Matrix::zeros(2, 2))
    .with_constraint_hessians(|_, i| match i {
        0 => Matrix::from_rows(&[&[0.0, 0.0], &[0.0, -1.0]]),
        1 => Matrix::from_rows(&[&[0.0, 0.0], &[0.0, -2.0]]),
        _ => Matrix::from_rows(&[&[0.0, 0.0], &[0.0, 2.0]]),
    })
}

fn tp4() -> Problem {
    Problem::new(
        "tp4",
        1,
        2,
        vec![-4.0],
        |x| x[0],
        |_| vec![1.0],
        |x| vec![x[0] * x[0] - 1.0, x[0] - 2.0],
        |x| Matrix::from_rows(&[&[2.0 * x[0], 1.0]]),
    )
    .with_objective_hessian(|_| Matrix::from_rows(&[&[0.0]]))
    .with_constraint_hessians(|_, i| match i {
        0 => Matrix::from_rows(&[&[2.0]]),
        _ => Matrix::from_rows(&[&[0.0]]),
    })
}

fn tp5() -> Problem {
    Problem::new(
        "tp5",
        2,
        3,
        vec![-2.0, -2.0],
        |x| (x[0] - 2.0).powi(2) + x[1] * x[1],
        |x| vec![2.0 * (x[0] - 2.0), 2.0 * x[1]],
        |x| vec![(1.0 - x[0]).powi(3) - x[1], x[0], x[1]],
        |x| {
            Matrix::from_rows(&[
                &[-3.0 * (1.0 - x[0]) * (1.0 - x[0]), 1.0, 0.0],
                &[-1.0, 0.0, 1.0],
            ])
        },
    )
    .with_objective_hessian(|_| Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]))
    .with_constraint_hessians(|x, i| match i {
        0 => Matrix::from_rows(&[&[6.0 * (1.0 - x[0]), 0.0], &[0.0, 0.0]]),
        _ => Matrix::zeros(2, 2),
    })
}

pub fn problem_names() -> [&'static str; 5] {
    ["tp1", "tp2", "tp3", "tp4", "tp5"]
}

/// All registered problems, with analytic gradients and Hessians.
pub fn register_problems() -> Vec<Problem> {
    vec![tp1(), tp2(), tp3(), tp4(), tp5()]
}

/// Looks up a registered problem by (case-insensitive) name.
pub fn get_problem(name: &str) -> Result<Problem> {
    match name.to_ascii_lowercase().as_str() {
        "tp1" => Ok(tp1()),
        "tp2" => Ok(tp2()),
        "tp3" => Ok(tp3()),
        "tp4" => Ok(tp4()),
        "tp5" => Ok(tp5()),
        _ => Err(Error::UnknownProblem {
            name: name.to_string(),
            available: problem_names().join(", "),
        }),
    }
}

/// Reference outcome data for one problem: the deterministic row-zero
/// quantities, the final point and classification, and the solver-level
/// expectations with their acceptance tolerances.
#[derive(Debug, Clone)]
pub struct ReferenceOutcome {
    pub name: &'static str,
    pub status: TerminationStatus,
    pub x_final: &'static [f64],
    /// Infinity-norm tolerance on `x_final`.
    pub x_tol: f64,
    pub initial_f: f64,
    /// Row k = 0: (E01, E02, E03, E04).
    pub initial_residuals: [f64; 4],
    /// Total iterations reported for the original reference runs.
    pub reference_total_iterations: usize,
    /// Acceptance budget on total inner iterations (trajectories differ in
    /// detail across quasi-Newton implementations).
    pub inner_iter_budget: usize,
    /// Expected final `e3` with tolerance.
    pub final_e3: Option<(f64, f64)>,
    /// Upper bound on the final `e4`.
    pub final_e4_max: Option<f64>,
    /// Expected final multipliers with infinity-norm tolerance.
    pub final_s: Option<(&'static [f64], f64)>,
    /// Lower bound on rho at termination.
    pub rho_at_least: Option<f64>,
    /// Upper bound on mu at termination.
    pub mu_at_most: Option<f64>,
    /// Required per-step shrink factor of `e4` over the last three
    /// records (rapid infeasibility detection).
    pub e4_decay_factor: Option<f64>,
}

pub fn reference_outcomes() -> Vec<ReferenceOutcome> {
    vec![
        ReferenceOutcome {
            name: "tp1",
            status: TerminationStatus::InfeasibleStationary,
            x_final: &[0.0, 0.7728],
            x_tol: 1e-3,
            initial_f: 5.0,
            initial_residuals: [7.0, 8.0, 8.0, 48.0],
            reference_total_iterations: 14,
            inner_iter_budget: 40,
            final_e3: Some((0.3497, 1e-2)),
            final_e4_max: Some(1e-8),
            final_s: None,
            rho_at_least: None,
            mu_at_most: None,
            e4_decay_factor: Some(5.0),
        },
        ReferenceOutcome {
            name: "tp2",
            status: TerminationStatus::InfeasibleStationary,
            x_final: &[0.0, 0.0],
            x_tol: 1e-6,
            initial_f: 5.0,
            initial_residuals: [13.0, 12.0, 12.0, 126.0],
            reference_total_iterations: 15,
            inner_iter_budget: 45,
            final_e3: Some((1.0, 1e-3)),
            final_e4_max: None,
            final_s: None,
            rho_at_least: None,
            mu_at_most: None,
            e4_decay_factor: Some(5.0),
        },
        ReferenceOutcome {
            name: "tp3",
            status: TerminationStatus::InfeasibleStationary,
            x_final: &[-0.2, 0.0],
            x_tol: 1e-3,
            initial_f: -20.0,
            initial_residuals: [10.0, 120.0, 120.0, 2805.0],
            reference_total_iterations: 15,
            inner_iter_budget: 45,
            final_e3: Some((0.4, 1e-3)),
            final_e4_max: None,
            final_s: None,
            rho_at_least: None,
            mu_at_most: None,
            e4_decay_factor: Some(5.0),
        },
        ReferenceOutcome {
            name: "tp4",
            status: TerminationStatus::Kkt,
            x_final: &[2.0],
            x_tol: 1e-4,
            initial_f: -4.0,
            initial_residuals: [8.0, 15.0, 6.0, 6.0],
            reference_total_iterations: 17,
            inner_iter_budget: 50,
            final_e3: None,
            final_e4_max: None,
            final_s: Some((&[0.0, 1.0], 1e-4)),
            rho_at_least: None,
            mu_at_most: None,
            e4_decay_factor: None,
        },
        ReferenceOutcome {
            name: "tp5",
            status: TerminationStatus::SingularStationary,
            x_final: &[1.0, 0.0],
            x_tol: 1e-2,
            initial_f: 20.0,
            initial_residuals: [18.0, 29.0, 2.0, 2.0],
            reference_total_iterations: 31,
            inner_iter_budget: 90,
            final_e3: None,
            final_e4_max: None,
            final_s: None,
            rho_at_least: Some(1e15),
            mu_at_most: Some(1e-7),
            e4_decay_factor: None,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
    /// The check presumes the default configuration and another one was
    /// supplied.
    NotApplicable,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub label: &'static str,
    pub outcome: CheckOutcome,
}

impl Check {
    fn pass_or(label: &'static str, ok: bool, detail: String) -> Self {
        let outcome = if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail(detail)
        };
        Check { label, outcome }
    }
}

/// Per-problem comparison of a run against the reference outcome.
#[derive(Debug)]
pub struct ProblemReport {
    pub problem: String,
    pub checks: Vec<Check>,
    pub result: SolveResult,
}

impl ProblemReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| !matches!(c.outcome, CheckOutcome::Fail(_)))
    }
}

impl std::fmt::Display for ProblemReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for check in &self.checks {
            let line = match &check.outcome {
                CheckOutcome::Pass => format!("PASS  {}: {}", self.problem, check.label),
                CheckOutcome::Fail(d) => format!("FAIL  {}: {} ({d})", self.problem, check.label),
                CheckOutcome::NotApplicable => {
                    format!(
                        "SKIP  {}: {} (non-default config)",
                        self.problem, check.label
                    )
                }
            };
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn rel_4sig(actual: f64, expected: f64) -> bool {
    if expected == 0.0 {
        return actual.abs() < 5e-4;
    }
    ((actual - expected) / expected).abs() <= 5e-4
}

/// Runs every registered problem under `config` and grades the outcome
/// against the reference data. Iteration budgets are only graded under the
/// default configuration; everything else is always evaluated. Failures
/// are reported, not thrown.
pub fn run_reference_suite(config: &OuterConfig) -> Result<Vec<ProblemReport>> {
    let default_config = *config == OuterConfig::default();
    let mut reports = Vec::new();
    for reference in reference_outcomes() {
        let problem = get_problem(reference.name)?;
        let result = solve(&problem, config)?;
        reports.push(grade(&problem, &reference, result, default_config)?);
    }
    Ok(reports)
}

fn grade(
    problem: &Problem,
    reference: &ReferenceOutcome,
    result: SolveResult,
    default_config: bool,
) -> Result<ProblemReport> {
    let mut checks = Vec::new();

    // deterministic row-zero quantities, solver-independent
    let f0 = problem.f(problem.x0())?;
    checks.push(Check::pass_or(
        "initial objective",
        rel_4sig(f0, reference.initial_f),
        format!("f0 = {f0}, expected {}", reference.initial_f),
    ));
    let s0 = vec![1.0; problem.m()];
    let r0 = eval_residuals(problem, problem.x0(), &s0, 1.0)?;
    let r0v = [r0.e1, r0.e2, r0.e3, r0.e4];
    for (i, (actual, expected)) in r0v.iter().zip(&reference.initial_residuals).enumerate() {
        let labels = ["initial E1", "initial E2", "initial E3", "initial E4"];
        checks.push(Check::pass_or(
            labels[i],
            rel_4sig(*actual, *expected),
            format!("{actual} vs {expected}"),
        ));
    }

    // classification and final point
    checks.push(Check::pass_or(
        "termination status",
        result.status == reference.status,
        format!("{} vs {}", result.status, reference.status),
    ));
    let x_err = result
        .x_final
        .iter()
        .zip(reference.x_final)
        .fold(0.0_f64, |a, (xi, ei)| a.max((xi - ei).abs()));
    checks.push(Check::pass_or(
        "final point",
        x_err <= reference.x_tol,
        format!("|x - x*|_inf = {x_err:.3e} > {:.1e}", reference.x_tol),
    ));

    let last = result.final_record();
    if let Some((e3, tol)) = reference.final_e3 {
        checks.push(Check::pass_or(
            "final E3",
            (last.residuals.e3 - e3).abs() <= tol,
            format!("{} vs {e3}", last.residuals.e3),
        ));
    }
    if let Some(bound) = reference.final_e4_max {
        checks.push(Check::pass_or(
            "final E4",
            last.residuals.e4 <= bound,
            format!("{} > {bound:.1e}", last.residuals.e4),
        ));
    }
    if let Some((s_exp, tol)) = reference.final_s {
        let s_err = result
            .s_final
            .iter()
            .zip(s_exp)
            .fold(0.0_f64, |a, (si, ei)| a.max((si - ei).abs()));
        checks.push(Check::pass_or(
            "final multipliers",
            s_err <= tol,
            format!("|s - s*|_inf = {s_err:.3e} > {tol:.1e}"),
        ));
    }
    if let Some(rho_min) = reference.rho_at_least {
        checks.push(Check::pass_or(
            "rho at termination",
            last.rho >= rho_min,
            format!("rho = {:.3e} < {rho_min:.1e}", last.rho),
        ));
    }
    if let Some(mu_max) = reference.mu_at_most {
        checks.push(Check::pass_or(
            "mu at termination",
            last.mu <= mu_max,
            format!("mu = {:.3e} > {mu_max:.1e}", last.mu),
        ));
    }
    if let Some(factor) = reference.e4_decay_factor {
        let h = &result.history;
        let ok = h.len() >= 3 && {
            let tail = &h[h.len() - 3..];
            tail.windows(2)
                .all(|w| w[1].residuals.e4 * factor <= w[0].residuals.e4)
        };
        let tail_e4: Vec<f64> = h.iter().rev().take(3).map(|r| r.residuals.e4).collect();
        checks.push(Check::pass_or(
            "rapid E4 decay",
            ok,
            format!("last e4 values (newest first): {tail_e4:?}"),
        ));
    }

    // trajectory-level check, only meaningful at the reference settings
    let budget_check = if default_config {
        Check::pass_or(
            "inner iteration budget",
            result.total_inner_iters() <= reference.inner_iter_budget,
            format!(
                "{} inner iterations > budget {}",
                result.total_inner_iters(),
                reference.inner_iter_budget
            ),
        )
    } else {
        Check {
            label: "inner iteration budget",
            outcome: CheckOutcome::NotApplicable,
        }
    };
    checks.push(budget_check);

    Ok(ProblemReport {
        problem: reference.name.to_string(),
        checks,
        result,
    })
}
