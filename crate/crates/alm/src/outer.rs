//! The outer method of multipliers.
//!
//! Each outer iteration minimizes the scaled augmented Lagrangian in x to
//! the inexactness certificate, promotes `rho * y` to the next multiplier
//! estimate, and gates the parameter update on the multiplier-consistency
//! measure `E~ = |z(x, s_new) - c(x)|_inf`:
//!
//! * `E~ > 0.95 mu` — the new multipliers are rejected, `s` is kept and
//!   `rho` at least doubles;
//! * otherwise — the new multipliers are kept, `mu` shrinks by at least a
//!   factor of ten and `rho` is floored at `|s|_inf`.
//!
//! The loop stops as soon as either all KKT measures fall below `eps`, or
//! the iterates are stationary for the constraint-violation measure while
//! still infeasible (`E3 > eps`, `E4 < eps`). The second branch is split
//! by the size of the residual violation: a tiny `E3` means the iterates
//! are essentially feasible but no bounded multipliers exist (singular
//! stationary point); a large one means a genuinely infeasible problem.

use crate::auglag::{update_lambda, EqualityState};
use crate::error::{Error, Result};
use crate::inner::{minimize_subproblem_eq, BfgsState, InnerConfig, InnerMethod, InnerStatus};
use crate::linalg::inf_norm;
use crate::nlp::{eval_residuals_eq, Problem, Residuals};
use crate::smoothing::{eval_zy, zc_gap_inf, SmoothingParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Step 3 taken literally: reject doubles rho, accept shrinks mu by 10.
    Basic,
    /// The adaptive rule: reject grows rho up to quadratically, accept can
    /// shrink mu down to `max(mu^2, g^2)` with `g` the unscaled gradient
    /// norm at the subproblem solution.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterConfig {
    /// Initial smoothing parameter, in (0, 1).
    pub mu0: f64,
    /// Initial penalty parameter, >= 1.
    pub rho0: f64,
    /// Termination tolerance, in (0, mu0). Zero is the analysis-only
    /// setting and is rejected; `max_outer` bounds the run instead.
    pub eps: f64,
    pub max_outer: usize,
    pub update_rule: UpdateRule,
    /// Penalty overflow guard.
    pub rho_cap: f64,
    /// Second-branch split: `e3` at or below this classifies as singular
    /// stationary rather than infeasible. Default `100 * eps`.
    pub singular_tol: f64,
    pub inner: InnerConfig,
}

impl Default for OuterConfig {
    fn default() -> Self {
        Self {
            mu0: 0.1,
            rho0: 1.0,
            eps: 1e-8,
            max_outer: 200,
            update_rule: UpdateRule::Adaptive,
            rho_cap: 1e30,
            singular_tol: 100.0 * 1e-8,
            inner: InnerConfig::default(),
        }
    }
}

impl OuterConfig {
    /// Default configuration for a given tolerance, with the singular
    /// threshold scaled along.
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            singular_tol: 100.0 * eps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu0 > 0.0 && self.mu0 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mu0 must be in (0,1), got {}",
                self.mu0
            )));
        }
        if !(self.rho0 >= 1.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rho0 must be >= 1, got {}",
                self.rho0
            )));
        }
        if !(self.eps > 0.0 && self.eps < self.mu0) {
            return Err(Error::InvalidConfig(format!(
                "eps must be in (0, mu0) = (0, {}), got {}",
                self.mu0, self.eps
            )));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidConfig("max_outer must be positive".into()));
        }
        if !(self.rho_cap > self.rho0) {
            return Err(Error::InvalidConfig("rho_cap must exceed rho0".into()));
        }
        if !(self.singular_tol > 0.0) {
            return Err(Error::InvalidConfig("singular_tol must be positive".into()));
        }
        self.inner.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationStatus {
    Kkt,
    InfeasibleStationary,
    SingularStationary,
    IterationLimit,
    InnerFailure,
    RhoOverflow,
}

impl TerminationStatus {
    /// True for the three mathematically meaningful termini.
    pub fn is_solved(&self) -> bool {
        matches!(
            self,
            TerminationStatus::Kkt
                | TerminationStatus::InfeasibleStationary
                | TerminationStatus::SingularStationary
        )
    }
}

impl std::fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TerminationStatus::Kkt => "kkt",
            TerminationStatus::InfeasibleStationary => "infeasible_stationary",
            TerminationStatus::SingularStationary => "singular_stationary",
            TerminationStatus::IterationLimit => "iteration_limit",
            TerminationStatus::InnerFailure => "inner_failure",
            TerminationStatus::RhoOverflow => "rho_overflow",
        };
        f.write_str(s)
    }
}

/// What the stopping test says about a residual vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Kkt,
    InfeasibleStationary,
    SingularStationary,
    /// Neither branch fired; keep iterating.
    Continue,
}

/// The stopping test: first branch when all KKT measures are below `eps`,
/// second branch when the iterate is infeasible but stationary for the
/// violation measure, split by `singular_tol`.
pub fn classify_termination(residuals: &Residuals, config: &OuterConfig) -> Classification {
    if residuals.max_kkt() < config.eps {
        Classification::Kkt
    } else if residuals.e3 > config.eps && residuals.e4 < config.eps {
        if residuals.e3 <= config.singular_tol {
            Classification::SingularStationary
        } else {
            Classification::InfeasibleStationary
        }
    } else {
        Classification::Continue
    }
}

/// One row of the iteration log, mirroring the table layout
/// `(k, f_k, E_k1..E_k4, mu_k, rho_k, iter-sb)` plus the consistency
/// measures driving the Step 3 gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f_val: f64,
    pub residuals: Residuals,
    pub mu: f64,
    pub rho: f64,
    /// Inner iterations spent producing this iterate (0 for the initial
    /// record).
    pub inner_iters: usize,
    /// Whether the E~-test passed and the new multipliers were kept.
    /// `None` for the initial record.
    pub accepted: Option<bool>,
    /// `|z(x, s_old) - c|_inf` before the multiplier update (joined with
    /// `|h|_inf` when the problem has equalities).
    pub e_hat: Option<f64>,
    /// Same measure after the update; never exceeds `e_hat`.
    pub e_tilde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: TerminationStatus,
    pub x_final: Vec<f64>,
    pub s_final: Vec<f64>,
    /// Equality multipliers, present when the problem has p > 0.
    pub lambda_final: Option<Vec<f64>>,
    pub history: Vec<IterationRecord>,
}

impl SolveResult {
    pub fn final_record(&self) -> &IterationRecord {
        self.history.last().expect("history is never empty")
    }

    /// Inner iterations summed over the whole run.
    pub fn total_inner_iters(&self) -> usize {
        self.history.iter().map(|r| r.inner_iters).sum()
    }

    pub fn final_f(&self) -> f64 {
        self.final_record().f_val
    }
}

/// Runs the method of multipliers from the problem's standard starting
/// point with unit multiplier estimates.
pub fn solve(problem: &Problem, config: &OuterConfig) -> Result<SolveResult> {
    let x0 = problem.x0().to_vec();
    let s0 = vec![1.0; problem.m()];
    solve_from(problem, config, &x0, &s0)
}

/// Runs the method of multipliers from a caller-supplied primal/dual
/// start. `s_start` must be nonnegative.
pub fn solve_from(
    problem: &Problem,
    config: &OuterConfig,
    x_start: &[f64],
    s_start: &[f64],
) -> Result<SolveResult> {
    config.validate()?;
    if config.inner.method == InnerMethod::Newton && !problem.has_hessians() {
        return Err(Error::MissingHessians(problem.name().to_string()));
    }
    if x_start.len() != problem.n() {
        return Err(Error::Dimension {
            context: "x_start",
            expected: problem.n(),
            actual: x_start.len(),
        });
    }
    if s_start.len() != problem.m() {
        return Err(Error::Dimension {
            context: "s_start",
            expected: problem.m(),
            actual: s_start.len(),
        });
    }
    if s_start.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidConfig(
            "s_start must be nonnegative and finite".into(),
        ));
    }
    if x_start.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("x_start must be finite".into()));
    }

    let mut x = x_start.to_vec();
    let mut s = s_start.to_vec();
    let mut mu = config.mu0;
    let mut rho = config.rho0;
    let mut eq = (problem.p() > 0).then(|| EqualityState::zeros(problem.p()));
    let mut bstate: Option<BfgsState> = None;

    let lambda_slice = |eq: &Option<EqualityState>| -> Vec<f64> {
        eq.as_ref().map(|e| e.lambda.clone()).unwrap_or_default()
    };

    let mut residuals = eval_residuals_eq(problem, &x, &s, &lambda_slice(&eq), rho)?;
    let mut history = vec![IterationRecord {
        k: 0,
        f_val: problem.f(&x)?,
        residuals,
        mu,
        rho,
        inner_iters: 0,
        accepted: None,
        e_hat: None,
        e_tilde: None,
    }];

    let finish = |status, x: Vec<f64>, s: Vec<f64>, eq: Option<EqualityState>, history| {
        Ok(SolveResult {
            status,
            x_final: x,
            s_final: s,
            lambda_final: eq.map(|e| e.lambda),
            history,
        })
    };

    for k in 0.. {
        match classify_termination(&residuals, config) {
            Classification::Kkt => return finish(TerminationStatus::Kkt, x, s, eq, history),
            Classification::InfeasibleStationary => {
                return finish(TerminationStatus::InfeasibleStationary, x, s, eq, history)
            }
            Classification::SingularStationary => {
                return finish(TerminationStatus::SingularStationary, x, s, eq, history)
            }
            Classification::Continue => {}
        }
        if k >= config.max_outer {
            return finish(TerminationStatus::IterationLimit, x, s, eq, history);
        }
        // the stopping test has already had its chance at this iterate;
        // only now does unbounded penalty growth end the run
        if rho > config.rho_cap {
            return finish(TerminationStatus::RhoOverflow, x, s, eq, history);
        }

        let params = SmoothingParams::new(mu, rho)?;

        // Step 1: approximate argmin of the scaled subproblem
        let inner_outcome = minimize_subproblem_eq(
            problem,
            &s,
            eq.as_ref(),
            &params,
            &x,
            &config.inner,
            bstate.take(),
        );
        let inner_res = match inner_outcome {
            Ok((res, state)) => {
                bstate = state;
                if res.status != InnerStatus::Converged {
                    return finish(TerminationStatus::InnerFailure, res.x_new, s, eq, history);
                }
                res
            }
            Err(_) => return finish(TerminationStatus::InnerFailure, x, s, eq, history),
        };
        let x_next = inner_res.x_new.clone();
        let g_unscaled = rho * inner_res.final_scaled_grad_inf;

        // Step 2: multiplier candidate s+ = rho * y(x+, s)
        let c_next = problem.c(&x_next)?;
        let slacks_hat = eval_zy(&c_next, &s, &params)?;
        let s_cand: Vec<f64> = slacks_hat.y.iter().map(|y| rho * y).collect();

        // Step 3: consistency gate with the updated s, old mu and rho. For
        // equality constraints the update direction is lambda' - lambda =
        // rho h, the exact analogue of s' - s = rho (z - c), so |h|_inf
        // joins the gate: mu must not outrun the equality residual.
        let h_inf = if problem.p() > 0 {
            inf_norm(&problem.h_eq(&x_next)?)
        } else {
            0.0
        };
        let e_hat = zc_gap_inf(&c_next, &slacks_hat).max(h_inf);
        let slacks_tilde = eval_zy(&c_next, &s_cand, &params)?;
        let e_tilde = zc_gap_inf(&c_next, &slacks_tilde).max(h_inf);
        let accepted = e_tilde <= 0.95 * mu;

        let (mu_next, rho_next) = if accepted {
            s = s_cand;
            if let Some(state) = eq.as_ref() {
                let h_val = problem.h_eq(&x_next)?;
                eq = Some(update_lambda(state, &h_val, rho));
            }
            let mu_next = match config.update_rule {
                UpdateRule::Basic => 0.1 * mu,
                UpdateRule::Adaptive => (0.1 * mu).min((mu * mu).max(g_unscaled * g_unscaled)),
            };
            (mu_next.max(f64::MIN_POSITIVE), rho.max(inf_norm(&s)))
        } else {
            let rho_next = match config.update_rule {
                UpdateRule::Basic => 2.0 * rho,
                UpdateRule::Adaptive => {
                    let quad = (rho * rho).min(rho * rho / (g_unscaled * g_unscaled));
                    (2.0 * rho).max(quad)
                }
            };
            (mu, rho_next)
        };

        if !rho_next.is_finite() {
            return finish(TerminationStatus::RhoOverflow, x_next, s, eq, history);
        }

        // Step 4: residuals at the new iterate with the updated parameters
        mu = mu_next;
        rho = rho_next;
        x = x_next;
        residuals = eval_residuals_eq(problem, &x, &s, &lambda_slice(&eq), rho)?;
        history.push(IterationRecord {
            k: k + 1,
            f_val: problem.f(&x)?,
            residuals,
            mu,
            rho,
            inner_iters: inner_res.iters,
            accepted: Some(accepted),
            e_hat: Some(e_hat),
            e_tilde: Some(e_tilde),
        });
    }
    unreachable!("loop exits via classification, iteration limit or overflow")
}
