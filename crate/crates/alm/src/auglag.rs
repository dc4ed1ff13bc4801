//! The smoothed augmented Lagrangian and its derivatives.
//!
//! ```text
//! F(x, s; mu, rho) = f(x) + sum_i h_i,
//! h_i = -mu ln z_i + (rho/2) y_i^2 - s_i^2 / (2 rho)
//! ```
//!
//! with z, y from [`crate::smoothing`]. Gradients in x and s:
//!
//! ```text
//! grad_x F = grad f(x) - rho * grad c(x) * y        (n-vector)
//! grad_s F = z - c(x)                               (m-vector)
//! ```
//!
//! The inner solver works on `(1/rho) F`, whose value and gradient are
//! assembled here directly in rho-scaled arithmetic (`s/rho` before
//! squaring, `mu/rho` against `ln z`): at the penalty levels the outer loop
//! reaches, the raw `(rho/2) y^2` terms dwarf everything else and would
//! wreck the line search. The unscaled `value`/`grad_x` fields are still
//! produced for reporting and may overflow to infinity at extreme `rho`
//! while the scaled fields stay valid.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nlp::Problem;
use crate::smoothing::{eval_zy, SmoothedSlacks, SmoothingParams};

/// Value and x-gradient of the augmented Lagrangian at one point, in both
/// raw and rho-scaled form, together with the smoothed slacks used.
#[derive(Debug, Clone)]
pub struct AuglagEval {
    pub value: f64,
    /// `value / rho`, assembled without forming `value`.
    pub scaled_value: f64,
    pub grad_x: Vec<f64>,
    /// `grad_x / rho`, assembled without forming `grad_x`.
    pub scaled_grad_x: Vec<f64>,
    pub slacks: SmoothedSlacks,
}

/// Equality-constraint multiplier estimates for the augmented extension
/// `F + lambda' h + (rho/2) |h|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityState {
    pub lambda: Vec<f64>,
}

impl EqualityState {
    pub fn zeros(p: usize) -> Self {
        Self {
            lambda: vec![0.0; p],
        }
    }
}

/// `lambda <- lambda + rho * h`.
pub fn update_lambda(eq: &EqualityState, h_val: &[f64], rho: f64) -> EqualityState {
    assert!(rho > 0.0);
    assert_eq!(eq.lambda.len(), h_val.len(), "lambda/h length mismatch");
    EqualityState {
        lambda: eq
            .lambda
            .iter()
            .zip(h_val)
            .map(|(l, h)| l + rho * h)
            .collect(),
    }
}

fn check_eq(problem: &Problem, eq: Option<&EqualityState>) -> Result<()> {
    if let Some(eq) = eq {
        if problem.p() == 0 {
            return Err(Error::NoEqualities(problem.name().to_string()));
        }
        if eq.lambda.len() != problem.p() {
            return Err(Error::Dimension {
                context: "equality multiplier estimate",
                expected: problem.p(),
                actual: eq.lambda.len(),
            });
        }
    }
    Ok(())
}

pub(crate) fn eval_f_opt(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: Option<&EqualityState>,
    params: &SmoothingParams,
) -> Result<AuglagEval> {
    check_eq(problem, eq)?;
    let (mu, rho) = (params.mu, params.rho);
    let fval = problem.f(x)?;
    let gf = problem.grad_f(x)?;
    let c = problem.c(x)?;
    let jac = problem.jac_c(x)?;
    let slacks = eval_zy(&c, s, params)?;
    let n = problem.n();

    let mut value = fval;
    let mut scaled_value = fval / rho;
    for i in 0..problem.m() {
        let (zi, yi) = (slacks.z[i], slacks.y[i]);
        let s_over_rho = s[i] / rho;
        value += -mu * zi.ln() + 0.5 * rho * yi * yi - 0.5 * rho * s_over_rho * s_over_rho;
        scaled_value += -(mu / rho) * zi.ln() + 0.5 * yi * yi - 0.5 * s_over_rho * s_over_rho;
    }

    let mut grad_x = vec![0.0; n];
    let mut scaled_grad_x = vec![0.0; n];
    for r in 0..n {
        let mut acc = 0.0;
        for i in 0..problem.m() {
            acc += jac[(r, i)] * slacks.y[i];
        }
        grad_x[r] = gf[r] - rho * acc;
        scaled_grad_x[r] = gf[r] / rho - acc;
    }

    if let Some(eq) = eq {
        let h = problem.h_eq(x)?;
        let jh = problem.jac_eq(x)?;
        let mut lin = 0.0;
        let mut quad = 0.0;
        for (j, hj) in h.iter().enumerate() {
            lin += eq.lambda[j] * hj;
            quad += hj * hj;
        }
        value += lin + 0.5 * rho * quad;
        scaled_value += lin / rho + 0.5 * quad;
        // grad += grad h * (lambda + rho h)
        for r in 0..n {
            let mut acc = 0.0;
            let mut acc_scaled = 0.0;
            for j in 0..problem.p() {
                acc += jh[(r, j)] * (eq.lambda[j] + rho * h[j]);
                acc_scaled += jh[(r, j)] * (eq.lambda[j] / rho + h[j]);
            }
            grad_x[r] += acc;
            scaled_grad_x[r] += acc_scaled;
        }
    }

    for (i, g) in scaled_grad_x.iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::NonFiniteEval {
                context: "scaled auglag gradient",
                index: i,
            });
        }
    }
    if !scaled_value.is_finite() {
        return Err(Error::NonFiniteEval {
            context: "scaled auglag value",
            index: 0,
        });
    }

    Ok(AuglagEval {
        value,
        scaled_value,
        grad_x,
        scaled_grad_x,
        slacks,
    })
}

/// Full evaluation of `F(x, s; mu, rho)` and its x-gradient.
pub fn eval_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<AuglagEval> {
    eval_f_opt(problem, x, s, None, params)
}

/// Equality-extended evaluation: `F + lambda' h + (rho/2) |h|^2`.
pub fn eval_f_eq(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: &EqualityState,
    params: &SmoothingParams,
) -> Result<AuglagEval> {
    if problem.p() == 0 {
        return Err(Error::NoEqualities(problem.name().to_string()));
    }
    eval_f_opt(problem, x, s, Some(eq), params)
}

/// Value-only probe of `(1/rho) F`, for line-search trials. Skips the
/// gradient callbacks entirely.
pub(crate) fn eval_scaled_f_opt(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: Option<&EqualityState>,
    params: &SmoothingParams,
) -> Result<f64> {
    check_eq(problem, eq)?;
    let (mu, rho) = (params.mu, params.rho);
    let fval = problem.f(x)?;
    let c = problem.c(x)?;
    let slacks = eval_zy(&c, s, params)?;
    let mut scaled = fval / rho;
    for i in 0..problem.m() {
        let s_over_rho = s[i] / rho;
        scaled += -(mu / rho) * slacks.z[i].ln() + 0.5 * slacks.y[i] * slacks.y[i]
            - 0.5 * s_over_rho * s_over_rho;
    }
    if let Some(eq) = eq {
        let h = problem.h_eq(x)?;
        for (j, hj) in h.iter().enumerate() {
            scaled += eq.lambda[j] * hj / rho + 0.5 * hj * hj;
        }
    }
    if !scaled.is_finite() {
        return Err(Error::NonFiniteEval {
            context: "scaled auglag value",
            index: 0,
        });
    }
    Ok(scaled)
}

/// `(1/rho) F(x, s; mu, rho)`, value only.
pub fn eval_scaled_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<f64> {
    eval_scaled_f_opt(problem, x, s, None, params)
}

fn hess_opt(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: Option<&EqualityState>,
    params: &SmoothingParams,
    scaled: bool,
) -> Result<Matrix> {
    check_eq(problem, eq)?;
    let rho = params.rho;
    let n = problem.n();
    let c = problem.c(x)?;
    let jac = problem.jac_c(x)?;
    let slacks = eval_zy(&c, s, params)?;

    // scaled:   grad^2 f / rho - sum y_i grad^2 c_i + sum frac_y_i g_i g_i'
    // unscaled: rho * scaled
    let outer_w = if scaled { 1.0 } else { rho };
    let mut hess = problem.hess_f(x)?;
    if scaled {
        hess.scale(1.0 / rho);
    }
    let mut col = vec![0.0; n];
    for i in 0..problem.m() {
        let hc = problem.hess_c(x, i)?;
        hess.add_scaled(&hc, -outer_w * slacks.y[i]);
        for (r, cr) in col.iter_mut().enumerate() {
            *cr = jac[(r, i)];
        }
        hess.add_outer(&col, outer_w * slacks.frac_y[i]);
    }

    if let Some(eq) = eq {
        let h = problem.h_eq(x)?;
        let jh = problem.jac_eq(x)?;
        for j in 0..problem.p() {
            let hh = problem.hess_eq(x, j)?;
            let w = if scaled {
                eq.lambda[j] / rho + h[j]
            } else {
                eq.lambda[j] + rho * h[j]
            };
            hess.add_scaled(&hh, w);
            for (r, cr) in col.iter_mut().enumerate() {
                *cr = jh[(r, j)];
            }
            hess.add_outer(&col, outer_w);
        }
    }
    Ok(hess)
}

/// Exact Hessian of F in x. Requires Hessian callbacks; quasi-Newton mode
/// exists for problems without them.
pub fn hess_x_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<Matrix> {
    hess_opt(problem, x, s, None, params, false)
}

/// `(1/rho)` times the Hessian of F in x, assembled in scaled arithmetic.
pub fn scaled_hess_x_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<Matrix> {
    hess_opt(problem, x, s, None, params, true)
}

/// Hessian of the equality-extended objective in x.
pub fn hess_x_f_eq(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: &EqualityState,
    params: &SmoothingParams,
) -> Result<Matrix> {
    if problem.p() == 0 {
        return Err(Error::NoEqualities(problem.name().to_string()));
    }
    hess_opt(problem, x, s, Some(eq), params, false)
}

pub(crate) fn scaled_hess_opt(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    eq: Option<&EqualityState>,
    params: &SmoothingParams,
) -> Result<Matrix> {
    hess_opt(problem, x, s, eq, params, true)
}

/// Gradient of F in s: `z - c(x)`.
pub fn grad_s_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<Vec<f64>> {
    let c = problem.c(x)?;
    let slacks = eval_zy(&c, s, params)?;
    Ok(slacks.z.iter().zip(&c).map(|(z, c)| z - c).collect())
}

/// Diagonal of the Hessian of F in s: `-(1/rho) z_i / (z_i + y_i)`, all
/// strictly negative (F is strictly concave in s).
pub fn hess_s_f(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    params: &SmoothingParams,
) -> Result<Vec<f64>> {
    let c = problem.c(x)?;
    let slacks = eval_zy(&c, s, params)?;
    Ok(slacks.frac_z.iter().map(|fz| -fz / params.rho).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inf_norm;

    fn params(mu: f64, rho: f64) -> SmoothingParams {
        SmoothingParams::new(mu, rho).unwrap()
    }

    // min (x1 - 1)^2 + 2 x2^2  s.t.  x1 >= 0, x1 + x2 >= -1
    fn toy() -> Problem {
        Problem::new(
            "toy2",
            2,
            2,
            vec![1.0, 1.0],
            |x| (x[0] - 1.0).powi(2) + 2.0 * x[1] * x[1],
            |x| vec![2.0 * (x[0] - 1.0), 4.0 * x[1]],
            |x| vec![x[0], x[0] + x[1] + 1.0],
            |_| Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]),
        )
        .with_objective_hessian(|_| Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 4.0]]))
        .with_constraint_hessians(|_, _| Matrix::zeros(2, 2))
    }

    fn fd_grad_x(
        problem: &Problem,
        x: &[f64],
        s: &[f64],
        p: &SmoothingParams,
        scaled: bool,
    ) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        for r in 0..x.len() {
            let h = 1e-6 * x[r].abs().max(1.0);
            xp[r] = x[r] + h;
            xm[r] = x[r] - h;
            let vp = eval_f(problem, &xp, s, p).unwrap();
            let vm = eval_f(problem, &xm, s, p).unwrap();
            g[r] = if scaled {
                (vp.scaled_value - vm.scaled_value) / (2.0 * h)
            } else {
                (vp.value - vm.value) / (2.0 * h)
            };
            xp[r] = x[r];
            xm[r] = x[r];
        }
        g
    }

    #[test]
    fn grad_x_matches_finite_differences() {
        let problem = toy();
        let points: [(&[f64], &[f64]); 3] = [
            (&[0.5, -0.5], &[1.0, 1.0]),
            (&[-2.0, 1.0], &[0.3, 2.0]),
            (&[3.0, 0.1], &[0.0, 0.7]),
        ];
        for &(x, s) in &points {
            for &(mu, rho) in &[(0.1, 1.0), (0.01, 8.0), (1e-4, 100.0)] {
                let p = params(mu, rho);
                let ev = eval_f(&problem, x, s, &p).unwrap();
                let fd = fd_grad_x(&problem, x, s, &p, false);
                for r in 0..2 {
                    let scale = ev.grad_x[r].abs().max(1.0);
                    assert!(
                        (ev.grad_x[r] - fd[r]).abs() < 1e-6 * scale,
                        "grad mismatch at mu={mu} rho={rho}: {} vs {}",
                        ev.grad_x[r],
                        fd[r]
                    );
                }
                let fd_scaled = fd_grad_x(&problem, x, s, &p, true);
                for r in 0..2 {
                    let scale = ev.scaled_grad_x[r].abs().max(1.0);
                    assert!((ev.scaled_grad_x[r] - fd_scaled[r]).abs() < 1e-6 * scale);
                }
            }
        }
    }

    #[test]
    fn grad_s_and_hess_s_match_finite_differences() {
        let problem = toy();
        let x = [0.7, -0.3];
        let s = [0.9, 0.4];
        let p = params(0.05, 3.0);
        let gs = grad_s_f(&problem, &x, &s, &p).unwrap();
        let hs = hess_s_f(&problem, &x, &s, &p).unwrap();
        for i in 0..2 {
            let h = 1e-6;
            let mut sp = s.to_vec();
            let mut sm = s.to_vec();
            sp[i] += h;
            sm[i] -= h;
            let vp = eval_f(&problem, &x, &sp, &p).unwrap().value;
            let vm = eval_f(&problem, &x, &sm, &p).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert!((gs[i] - fd).abs() < 1e-6 * gs[i].abs().max(1.0));

            let gp = grad_s_f(&problem, &x, &sp, &p).unwrap();
            let gm = grad_s_f(&problem, &x, &sm, &p).unwrap();
            let fd2 = (gp[i] - gm[i]) / (2.0 * h);
            assert!((hs[i] - fd2).abs() < 1e-6 * hs[i].abs().max(1.0));
            assert!(hs[i] < 0.0, "strict concavity in s");
        }
    }

    #[test]
    fn hess_x_matches_finite_differences_of_grad() {
        let problem = toy();
        let x = [0.4, 0.8];
        let s = [1.5, 0.2];
        for &(mu, rho) in &[(0.1, 1.0), (0.02, 50.0)] {
            let p = params(mu, rho);
            let hess = hess_x_f(&problem, &x, &s, &p).unwrap();
            for r in 0..2 {
                let h = 1e-6;
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[r] += h;
                xm[r] -= h;
                let gp = eval_f(&problem, &xp, &s, &p).unwrap().grad_x;
                let gm = eval_f(&problem, &xm, &s, &p).unwrap().grad_x;
                for q in 0..2 {
                    let fd = (gp[q] - gm[q]) / (2.0 * h);
                    let scale = hess[(q, r)].abs().max(1.0);
                    assert!((hess[(q, r)] - fd).abs() < 1e-5 * scale);
                }
            }
            // scaled variant is (1/rho) times the exact one
            let sh = scaled_hess_x_f(&problem, &x, &s, &p).unwrap();
            for r in 0..2 {
                for q in 0..2 {
                    let scale = sh[(q, r)].abs().max(1.0);
                    assert!((sh[(q, r)] - hess[(q, r)] / rho).abs() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn quadratic_objective_linear_constraint_hessian_is_exact() {
        // single linear constraint: curvature term vanishes and
        // hess = grad^2 f + rho * frac_y * a a'
        let problem = Problem::new(
            "quad",
            2,
            1,
            vec![0.0, 0.0],
            |x| 0.5 * (x[0] * x[0] + 3.0 * x[1] * x[1]),
            |x| vec![x[0], 3.0 * x[1]],
            |x| vec![2.0 * x[0] - x[1] + 1.0],
            |_| Matrix::from_rows(&[&[2.0], &[-1.0]]),
        )
        .with_objective_hessian(|_| Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 3.0]]))
        .with_constraint_hessians(|_, _| Matrix::zeros(2, 2));
        let p = params(0.1, 4.0);
        let x = [0.3, -0.2];
        let s = [0.8];
        let c = problem.c(&x).unwrap();
        let slacks = eval_zy(&c, &s, &p).unwrap();
        let hess = hess_x_f(&problem, &x, &s, &p).unwrap();
        // constraint gradient a = (2, -1)
        let w = p.rho * slacks.frac_y[0];
        let expected = [[1.0 + w * 4.0, -w * 2.0], [-w * 2.0, 3.0 + w]];
        for r in 0..2 {
            for q in 0..2 {
                assert!(
                    (hess[(r, q)] - expected[r][q]).abs() < 1e-12 * expected[r][q].abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn barrier_reduction_for_feasible_points() {
        // strictly feasible x with s_i = mu / c_i: F collapses to the
        // log-barrier value f - mu sum ln c_i for every rho
        let problem = toy();
        let x = [0.9, 0.2]; // c = (0.9, 2.1) > 0
        let mu = 0.05;
        let c = problem.c(&x).unwrap();
        let s: Vec<f64> = c.iter().map(|ci| mu / ci).collect();
        let barrier = problem.f(&x).unwrap() - mu * c.iter().map(|ci| ci.ln()).sum::<f64>();
        for &rho in &[1.0, 10.0, 1e3, 1e6, 1e9] {
            let ev = eval_f(&problem, &x, &s, &params(mu, rho)).unwrap();
            assert!(
                (ev.value - barrier).abs() <= 1e-10 * (1.0 + barrier.abs()),
                "rho = {rho}: {} vs {barrier}",
                ev.value
            );
            // grad_s = z - c = 0 there
            let gs = grad_s_f(&problem, &x, &s, &params(mu, rho)).unwrap();
            assert!(inf_norm(&gs) <= 1e-10);
        }
    }

    #[test]
    fn minimax_stationarity_yields_kkt_residuals() {
        // min (x-1)^2 s.t. x >= 0: the barrier minimizer x(mu) solves
        // 2(x-1) = mu/x, i.e. x = (1 + sqrt(1 + 2 mu)) / 2. With
        // s = mu / x both gradients vanish and the KKT measures follow.
        let problem = Problem::new(
            "scalar",
            1,
            1,
            vec![1.0],
            |x| (x[0] - 1.0).powi(2),
            |x| vec![2.0 * (x[0] - 1.0)],
            |x| vec![x[0]],
            |_| Matrix::from_rows(&[&[1.0]]),
        );
        let mu = 1e-6_f64;
        let x = [(1.0 + (1.0 + 2.0 * mu).sqrt()) / 2.0];
        let s = [mu / x[0]];
        for &rho in &[1.0, 100.0] {
            let p = params(mu, rho);
            let ev = eval_f(&problem, &x, &s, &p).unwrap();
            let gs = grad_s_f(&problem, &x, &s, &p).unwrap();
            assert!(inf_norm(&ev.grad_x) <= 1e-8);
            assert!(inf_norm(&gs) <= 1e-8);
            // stationarity of the minimax problem is the KKT system
            let gf = problem.grad_f(&x).unwrap();
            let jac = problem.jac_c(&x).unwrap();
            let dual = gf[0] - jac[(0, 0)] * s[0];
            assert!(dual.abs() <= 1e-8);
            let c = problem.c(&x).unwrap();
            assert!((c[0] - ev.slacks.z[0]).abs() <= 1e-8);
        }
    }

    #[test]
    fn scaled_and_unscaled_agree() {
        let problem = toy();
        let x = [2.0, -1.5];
        let s = [0.5, 3.0];
        for &rho in &[1.0, 7.0, 1e4] {
            let p = params(0.1, rho);
            let ev = eval_f(&problem, &x, &s, &p).unwrap();
            assert!(
                (ev.scaled_value - ev.value / rho).abs() <= 1e-12 * ev.scaled_value.abs().max(1.0)
            );
            for r in 0..2 {
                assert!(
                    (ev.scaled_grad_x[r] - ev.grad_x[r] / rho).abs()
                        <= 1e-12 * ev.scaled_grad_x[r].abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn dual_update_identity() {
        // rho * y(x, s) = s + rho (z(x, s) - c)
        let problem = toy();
        let x = [1.3, -0.4];
        let s = [2.0, 0.1];
        let p = params(0.01, 37.0);
        let c = problem.c(&x).unwrap();
        let sl = eval_zy(&c, &s, &p).unwrap();
        for i in 0..2 {
            let lhs = p.rho * sl.y[i];
            let rhs = s[i] + p.rho * (sl.z[i] - c[i]);
            let scale = lhs.abs().max(1.0);
            assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }

    fn toy_eq() -> Problem {
        // toy() plus equality x1 - 2 = 0
        Problem::new(
            "toy2eq",
            2,
            2,
            vec![1.0, 1.0],
            |x| (x[0] - 1.0).powi(2) + 2.0 * x[1] * x[1],
            |x| vec![2.0 * (x[0] - 1.0), 4.0 * x[1]],
            |x| vec![x[0], x[0] + x[1] + 1.0],
            |_| Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]),
        )
        .with_objective_hessian(|_| Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 4.0]]))
        .with_constraint_hessians(|_, _| Matrix::zeros(2, 2))
        .with_equalities(
            1,
            |x| vec![x[0] - 2.0],
            |_| Matrix::from_rows(&[&[1.0], &[0.0]]),
        )
        .with_equality_hessians(|_, _| Matrix::zeros(2, 2))
    }

    #[test]
    fn equality_extension_reduces_to_plain_f_when_h_zero() {
        let problem = toy_eq();
        let x = [2.0, 0.5]; // h(x) = 0
        let s = [1.0, 1.0];
        let p = params(0.1, 2.0);
        let eq = EqualityState::zeros(1);
        let plain = eval_f(&problem, &x, &s, &p).unwrap();
        let ext = eval_f_eq(&problem, &x, &s, &eq, &p).unwrap();
        assert_eq!(plain.value, ext.value);
        assert_eq!(plain.grad_x, ext.grad_x);
    }

    #[test]
    fn equality_gradient_matches_finite_differences() {
        let problem = toy_eq();
        let x = [1.4, -0.6];
        let s = [0.7, 1.2];
        let eq = EqualityState { lambda: vec![0.8] };
        let p = params(0.05, 5.0);
        let ev = eval_f_eq(&problem, &x, &s, &eq, &p).unwrap();
        for r in 0..2 {
            let h = 1e-6;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[r] += h;
            xm[r] -= h;
            let vp = eval_f_eq(&problem, &xp, &s, &eq, &p).unwrap().value;
            let vm = eval_f_eq(&problem, &xm, &s, &eq, &p).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert!((ev.grad_x[r] - fd).abs() < 1e-6 * ev.grad_x[r].abs().max(1.0));
        }
        // hessian too
        let hess = hess_x_f_eq(&problem, &x, &s, &eq, &p).unwrap();
        for r in 0..2 {
            let h = 1e-6;
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[r] += h;
            xm[r] -= h;
            let gp = eval_f_eq(&problem, &xp, &s, &eq, &p).unwrap().grad_x;
            let gm = eval_f_eq(&problem, &xm, &s, &eq, &p).unwrap().grad_x;
            for q in 0..2 {
                let fd = (gp[q] - gm[q]) / (2.0 * h);
                assert!((hess[(q, r)] - fd).abs() < 1e-5 * hess[(q, r)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn lambda_update_arithmetic() {
        let eq = EqualityState { lambda: vec![1.0] };
        let next = update_lambda(&eq, &[0.5], 2.0);
        assert_eq!(next.lambda, vec![2.0]);

        let eq = EqualityState { lambda: vec![0.0] };
        assert_eq!(update_lambda(&eq, &[0.0], 7.0).lambda, vec![0.0]);

        let eq = EqualityState {
            lambda: vec![1.0, -1.0],
        };
        assert_eq!(update_lambda(&eq, &[0.1, 0.2], 10.0).lambda, vec![2.0, 1.0]);
    }

    #[test]
    fn eval_f_eq_rejects_problems_without_equalities() {
        let problem = toy();
        let eq = EqualityState::zeros(1);
        let p = params(0.1, 1.0);
        assert!(matches!(
            eval_f_eq(&problem, &[0.0, 0.0], &[1.0, 1.0], &eq, &p),
            Err(Error::NoEqualities(_))
        ));
    }
}
