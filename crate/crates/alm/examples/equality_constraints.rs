//! Mixed equality/inequality constraints.
//!
//! Equalities h(x) = 0 enter through the classical multiplier term
//! lambda' h + (rho/2) |h|^2 added to the augmented Lagrangian; lambda is
//! updated by lambda <- lambda + rho h alongside the inequality
//! multipliers. The instance here is
//!
//! ```text
//! min  (x1 - 1)^2 + x2^2
//! s.t. x2 + 1 >= 0,   x1 - 2 = 0
//! ```
//!
//! with solution x* = (2, 0) and equality multiplier lambda* = -2.

use alm::{solve, Matrix, OuterConfig, Problem, TerminationStatus};

fn main() {
    let problem = Problem::new(
        "shifted",
        2,
        1,
        vec![0.0, 0.5],
        |x| (x[0] - 1.0).powi(2) + x[1] * x[1],
        |x| vec![2.0 * (x[0] - 1.0), 2.0 * x[1]],
        |x| vec![x[1] + 1.0],
        |_| Matrix::from_rows(&[&[0.0], &[1.0]]),
    )
    .with_objective_hessian(|_| Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]))
    .with_constraint_hessians(|_, _| Matrix::zeros(2, 2))
    .with_equalities(
        1,
        |x| vec![x[0] - 2.0],
        |_| Matrix::from_rows(&[&[1.0], &[0.0]]),
    )
    .with_equality_hessians(|_, _| Matrix::zeros(2, 2));

    let result = solve(&problem, &OuterConfig::default()).unwrap();
    assert_eq!(result.status, TerminationStatus::Kkt);

    let lambda = result.lambda_final.as_ref().unwrap();
    println!("x      = {:?}", result.x_final);
    println!("s      = {:?}", result.s_final);
    println!("lambda = {lambda:?}");
    println!("h(x)   = {:?}", problem.h_eq(&result.x_final).unwrap());

    assert!((result.x_final[0] - 2.0).abs() < 1e-5);
    assert!(result.x_final[1].abs() < 1e-5);
    assert!((lambda[0] + 2.0).abs() < 1e-4);

    // per-iteration view of the equality residual folded into E3
    println!("\n  k      E3 = max(violation, |h|)      mu         rho");
    for rec in &result.history {
        println!(
            "  {:2}     {:24.6e}   {:9.2e}   {:9.3e}",
            rec.k, rec.residuals.e3, rec.mu, rec.rho
        );
    }
}
