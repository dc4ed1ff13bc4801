//! Problem-instance contract and KKT/infeasibility residuals.
//!
//! A [`Problem`] is an inequality-constrained nonlinear program
//!
//! ```text
//! min f(x)   s.t.  c(x) >= 0   (m inequalities)
//!                  h(x) =  0   (p equalities, optional)
//! ```
//!
//! described by evaluation callbacks. The constraint Jacobian is stored
//! n-by-m with the gradient of constraint i as column i, so `jac * v`
//! directly forms linear combinations of constraint gradients; one
//! convention everywhere.

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Matrix};
use serde::{Deserialize, Serialize};

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type MatrixFn = Box<dyn Fn(&[f64]) -> Matrix + Send + Sync>;
type IndexedMatrixFn = Box<dyn Fn(&[f64], usize) -> Matrix + Send + Sync>;

const HESS_SYMMETRY_TOL: f64 = 1e-12;

/// An inequality/equality NLP instance. Immutable after construction and
/// safe to share across concurrent solver runs; callbacks must be
/// re-entrant and deterministic.
pub struct Problem {
    name: String,
    n: usize,
    m: usize,
    p: usize,
    objective: ScalarFn,
    objective_grad: VectorFn,
    objective_hess: Option<MatrixFn>,
    constraints: VectorFn,
    constraints_jac: MatrixFn,
    constraints_hess: Option<IndexedMatrixFn>,
    equalities: Option<VectorFn>,
    equalities_jac: Option<MatrixFn>,
    equalities_hess: Option<IndexedMatrixFn>,
    x0: Vec<f64>,
}

impl Problem {
    /// Creates a problem from the mandatory callbacks: objective, objective
    /// gradient, constraints and constraint Jacobian (n-by-m, column i is
    /// the gradient of constraint i).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        n: usize,
        m: usize,
        x0: Vec<f64>,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        objective_grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        constraints: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        constraints_jac: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        assert!(n > 0, "n must be positive");
        assert!(m > 0, "m must be positive");
        assert_eq!(x0.len(), n, "x0 length must equal n");
        Self {
            name: name.into(),
            n,
            m,
            p: 0,
            objective: Box::new(objective),
            objective_grad: Box::new(objective_grad),
            objective_hess: None,
            constraints: Box::new(constraints),
            constraints_jac: Box::new(constraints_jac),
            constraints_hess: None,
            equalities: None,
            equalities_jac: None,
            equalities_hess: None,
            x0,
        }
    }

    pub fn with_objective_hessian(
        mut self,
        hess: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.objective_hess = Some(Box::new(hess));
        self
    }

    /// Hessian of constraint i, as `(x, i) -> n x n`.
    pub fn with_constraint_hessians(
        mut self,
        hess: impl Fn(&[f64], usize) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.constraints_hess = Some(Box::new(hess));
        self
    }

    /// Adds p equality constraints `h(x) = 0` with an n-by-p Jacobian.
    pub fn with_equalities(
        mut self,
        p: usize,
        equalities: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        equalities_jac: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        assert!(p > 0, "p must be positive");
        self.p = p;
        self.equalities = Some(Box::new(equalities));
        self.equalities_jac = Some(Box::new(equalities_jac));
        self
    }

    pub fn with_equality_hessians(
        mut self,
        hess: impl Fn(&[f64], usize) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.equalities_hess = Some(Box::new(hess));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// True when both objective and constraint Hessians are available
    /// (required for Newton inner iterations).
    pub fn has_hessians(&self) -> bool {
        self.objective_hess.is_some() && self.constraints_hess.is_some()
    }

    pub fn f(&self, x: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        let v = (self.objective)(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteEval {
                context: "objective",
                index: 0,
            });
        }
        Ok(v)
    }

    pub fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let g = (self.objective_grad)(x);
        check_vec("objective gradient", &g, self.n)?;
        Ok(g)
    }

    pub fn hess_f(&self, x: &[f64]) -> Result<Matrix> {
        self.check_x(x)?;
        let cb = self
            .objective_hess
            .as_ref()
            .ok_or_else(|| Error::MissingHessians(self.name.clone()))?;
        let h = cb(x);
        check_sym("objective hessian", &h, self.n)?;
        Ok(h)
    }

    pub fn c(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let c = (self.constraints)(x);
        check_vec("constraints", &c, self.m)?;
        Ok(c)
    }

    pub fn jac_c(&self, x: &[f64]) -> Result<Matrix> {
        self.check_x(x)?;
        let j = (self.constraints_jac)(x);
        check_mat("constraint jacobian", &j, self.n, self.m)?;
        Ok(j)
    }

    pub fn hess_c(&self, x: &[f64], i: usize) -> Result<Matrix> {
        self.check_x(x)?;
        assert!(i < self.m, "constraint index out of range");
        let cb = self
            .constraints_hess
            .as_ref()
            .ok_or_else(|| Error::MissingHessians(self.name.clone()))?;
        let h = cb(x, i);
        check_sym("constraint hessian", &h, self.n)?;
        Ok(h)
    }

    pub fn h_eq(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let cb = self
            .equalities
            .as_ref()
            .ok_or_else(|| Error::NoEqualities(self.name.clone()))?;
        let h = cb(x);
        check_vec("equalities", &h, self.p)?;
        Ok(h)
    }

    pub fn jac_eq(&self, x: &[f64]) -> Result<Matrix> {
        self.check_x(x)?;
        let cb = self
            .equalities_jac
            .as_ref()
            .ok_or_else(|| Error::NoEqualities(self.name.clone()))?;
        let j = cb(x);
        check_mat("equality jacobian", &j, self.n, self.p)?;
        Ok(j)
    }

    pub fn hess_eq(&self, x: &[f64], j: usize) -> Result<Matrix> {
        self.check_x(x)?;
        assert!(j < self.p, "equality index out of range");
        let cb = self
            .equalities_hess
            .as_ref()
            .ok_or_else(|| Error::MissingHessians(self.name.clone()))?;
        let h = cb(x, j);
        check_sym("equality hessian", &h, self.n)?;
        Ok(h)
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                context: "evaluation point",
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("p", &self.p)
            .field("x0", &self.x0)
            .finish()
    }
}

fn check_vec(context: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Dimension {
            context,
            expected,
            actual: v.len(),
        });
    }
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteEval { context, index: i });
        }
    }
    Ok(())
}

fn check_mat(context: &'static str, m: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::Dimension {
            context,
            expected: rows * cols,
            actual: m.rows() * m.cols(),
        });
    }
    for r in 0..rows {
        for c in 0..cols {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFiniteEval {
                    context,
                    index: r * cols + c,
                });
            }
        }
    }
    Ok(())
}

fn check_sym(context: &'static str, m: &Matrix, n: usize) -> Result<()> {
    check_mat(context, m, n, n)?;
    let asym = m.max_asymmetry();
    if asym > HESS_SYMMETRY_TOL * m.max_abs().max(1.0) {
        return Err(Error::AsymmetricHessian {
            context,
            asymmetry: asym,
        });
    }
    Ok(())
}

/// The four stopping measures of the outer loop: scaled dual residual,
/// scaled complementarity, constraint violation, and the stationarity of
/// the violation measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `(1/rho) * || grad f - grad c * s ||_inf`
    pub e1: f64,
    /// `(1/rho) * || s o c ||_inf`
    pub e2: f64,
    /// `|| max(0, -c) ||_inf`
    pub e3: f64,
    /// `|| grad c * max(0, -c) ||_inf`
    pub e4: f64,
}

impl Residuals {
    pub fn max_kkt(&self) -> f64 {
        self.e1.max(self.e2).max(self.e3)
    }
}

/// Componentwise `max(0, -c)`.
pub(crate) fn violations(c: &[f64]) -> Vec<f64> {
    c.iter().map(|&ci| (-ci).max(0.0)).collect()
}

/// Evaluates the stopping residuals at `(x, s)` with penalty `rho`.
pub fn eval_residuals(problem: &Problem, x: &[f64], s: &[f64], rho: f64) -> Result<Residuals> {
    eval_residuals_eq(problem, x, s, &[], rho)
}

/// Residuals extended with equality-constraint terms: the dual residual
/// gains `+ grad h * lambda`, feasibility covers `|h|`, and the
/// infeasible-stationarity measure covers the equality part of the squared
/// violation. Reduces exactly to [`eval_residuals`] when `p = 0`.
pub fn eval_residuals_eq(
    problem: &Problem,
    x: &[f64],
    s: &[f64],
    lambda: &[f64],
    rho: f64,
) -> Result<Residuals> {
    assert!(rho > 0.0, "rho must be positive");
    if s.len() != problem.m() {
        return Err(Error::Dimension {
            context: "multiplier estimate",
            expected: problem.m(),
            actual: s.len(),
        });
    }
    let gf = problem.grad_f(x)?;
    let c = problem.c(x)?;
    let jac = problem.jac_c(x)?;

    // dual: grad f - grad c * s (+ grad h * lambda)
    let mut dual = gf;
    let jv = jac.mul_vec(s);
    for (d, v) in dual.iter_mut().zip(&jv) {
        *d -= v;
    }

    // stationarity of the violation measure: grad c * max(0,-c) (- grad h * h)
    let viol = violations(&c);
    let mut stat = jac.mul_vec(&viol);

    let mut e3 = inf_norm(&viol);
    if problem.p() > 0 {
        if lambda.len() != problem.p() {
            return Err(Error::Dimension {
                context: "equality multiplier estimate",
                expected: problem.p(),
                actual: lambda.len(),
            });
        }
        let h = problem.h_eq(x)?;
        let jh = problem.jac_eq(x)?;
        let jl = jh.mul_vec(lambda);
        for (d, v) in dual.iter_mut().zip(&jl) {
            *d += v;
        }
        let jhh = jh.mul_vec(&h);
        for (t, v) in stat.iter_mut().zip(&jhh) {
            *t -= v;
        }
        e3 = e3.max(inf_norm(&h));
    }

    let comp: Vec<f64> = s.iter().zip(&c).map(|(si, ci)| si * ci).collect();

    Ok(Residuals {
        e1: inf_norm(&dual) / rho,
        e2: inf_norm(&comp) / rho,
        e3,
        e4: inf_norm(&stat),
    })
}

/// Outcome of a finite-difference derivative audit: maximum relative error
/// per derivative block. Blocks without callbacks are `None`.
#[derive(Debug, Clone)]
pub struct DerivCheckReport {
    pub tol: f64,
    pub grad_f: f64,
    pub jac_c: f64,
    pub hess_f: Option<f64>,
    pub hess_c: Option<f64>,
    pub jac_eq: Option<f64>,
    pub hess_eq: Option<f64>,
}

impl DerivCheckReport {
    pub fn max_error(&self) -> f64 {
        [
            Some(self.grad_f),
            Some(self.jac_c),
            self.hess_f,
            self.hess_c,
            self.jac_eq,
            self.hess_eq,
        ]
        .into_iter()
        .flatten()
        .fold(0.0_f64, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_error() < self.tol
    }
}

impl std::fmt::Display for DerivCheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "absent".to_string(), |e| format!("{e:.3e}"))
        }
        writeln!(f, "grad f   : {:.3e}", self.grad_f)?;
        writeln!(f, "jac c    : {:.3e}", self.jac_c)?;
        writeln!(f, "hess f   : {}", opt(self.hess_f))?;
        writeln!(f, "hess c   : {}", opt(self.hess_c))?;
        if self.jac_eq.is_some() || self.hess_eq.is_some() {
            writeln!(f, "jac h    : {}", opt(self.jac_eq))?;
            writeln!(f, "hess h   : {}", opt(self.hess_eq))?;
        }
        write!(
            f,
            "max {:.3e} vs tol {:.1e}: {}",
            self.max_error(),
            self.tol,
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

fn fd_step(xi: f64) -> f64 {
    1e-6 * xi.abs().max(1.0)
}

fn rel_err(analytic: f64, fd: f64) -> f64 {
    (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1.0)
}

/// Audits every analytic derivative of `problem` against central finite
/// differences at `x` (per-coordinate step `1e-6 * max(1, |x_i|)`).
pub fn finite_diff_check(problem: &Problem, x: &[f64], tol: f64) -> Result<DerivCheckReport> {
    assert!(tol > 0.0, "tol must be positive");
    let n = problem.n();
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();

    let mut grad_f_err: f64 = 0.0;
    let mut jac_c_err: f64 = 0.0;
    let mut hess_f_err: Option<f64> = problem.objective_hess.as_ref().map(|_| 0.0);
    let mut hess_c_err: Option<f64> = problem.constraints_hess.as_ref().map(|_| 0.0);
    let mut jac_eq_err: Option<f64> = problem.equalities.as_ref().map(|_| 0.0);
    let mut hess_eq_err: Option<f64> = problem.equalities_hess.as_ref().map(|_| 0.0);

    let grad = problem.grad_f(x)?;
    let jac = problem.jac_c(x)?;

    for r in 0..n {
        let h = fd_step(x[r]);
        xp[r] = x[r] + h;
        xm[r] = x[r] - h;

        let df = (problem.f(&xp)? - problem.f(&xm)?) / (2.0 * h);
        grad_f_err = grad_f_err.max(rel_err(grad[r], df));

        let cp = problem.c(&xp)?;
        let cm = problem.c(&xm)?;
        for i in 0..problem.m() {
            let dc = (cp[i] - cm[i]) / (2.0 * h);
            jac_c_err = jac_c_err.max(rel_err(jac[(r, i)], dc));
        }

        if let Some(err) = hess_f_err.as_mut() {
            let hf = problem.hess_f(x)?;
            let gp = problem.grad_f(&xp)?;
            let gm = problem.grad_f(&xm)?;
            for q in 0..n {
                let d2 = (gp[q] - gm[q]) / (2.0 * h);
                *err = err.max(rel_err(hf[(q, r)], d2));
            }
        }

        if let Some(err) = hess_c_err.as_mut() {
            let jp = problem.jac_c(&xp)?;
            let jm = problem.jac_c(&xm)?;
            for i in 0..problem.m() {
                let hc = problem.hess_c(x, i)?;
                for q in 0..n {
                    let d2 = (jp[(q, i)] - jm[(q, i)]) / (2.0 * h);
                    *err = err.max(rel_err(hc[(q, r)], d2));
                }
            }
        }

        if let Some(err) = jac_eq_err.as_mut() {
            let jh = problem.jac_eq(x)?;
            let hp = problem.h_eq(&xp)?;
            let hm = problem.h_eq(&xm)?;
            for j in 0..problem.p() {
                let dh = (hp[j] - hm[j]) / (2.0 * h);
                *err = err.max(rel_err(jh[(r, j)], dh));
            }
        }

        if let Some(err) = hess_eq_err.as_mut() {
            let jp = problem.jac_eq(&xp)?;
            let jm = problem.jac_eq(&xm)?;
            for j in 0..problem.p() {
                let hh = problem.hess_eq(x, j)?;
                for q in 0..n {
                    let d2 = (jp[(q, j)] - jm[(q, j)]) / (2.0 * h);
                    *err = err.max(rel_err(hh[(q, r)], d2));
                }
            }
        }

        xp[r] = x[r];
        xm[r] = x[r];
    }

    Ok(DerivCheckReport {
        tol,
        grad_f: grad_f_err,
        jac_c: jac_c_err,
        hess_f: hess_f_err,
        hess_c: hess_c_err,
        jac_eq: jac_eq_err,
        hess_eq: hess_eq_err,
    })
}
