//! Define and solve your own problem through the library interface.
//!
//! The instance here is a circle-packing toy:
//!
//! ```text
//! min  (x1 + 1)^2 + (x2 - 2)^2
//! s.t. 1 - x1^2 - x2^2 >= 0      (unit disc)
//!      x2 >= 0                   (upper half)
//! ```
//!
//! The unconstrained minimizer (-1, 2) is outside the disc, so the disc
//! constraint is active at the solution, which lies on the boundary in the
//! direction of (-1, 2): x* = (-1, 2) / sqrt(5).

use alm::{finite_diff_check, solve, Matrix, OuterConfig, Problem, TerminationStatus};

fn main() {
    let problem = Problem::new(
        "disc",
        2,
        2,
        vec![0.0, 0.0],
        |x| (x[0] + 1.0).powi(2) + (x[1] - 2.0).powi(2),
        |x| vec![2.0 * (x[0] + 1.0), 2.0 * (x[1] - 2.0)],
        |x| vec![1.0 - x[0] * x[0] - x[1] * x[1], x[1]],
        |x| Matrix::from_rows(&[&[-2.0 * x[0], 0.0], &[-2.0 * x[1], 1.0]]),
    )
    .with_objective_hessian(|_| Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]))
    .with_constraint_hessians(|_, i| match i {
        0 => Matrix::from_rows(&[&[-2.0, 0.0], &[0.0, -2.0]]),
        _ => Matrix::zeros(2, 2),
    });

    // audit the hand-written derivatives before trusting any run
    let report = finite_diff_check(&problem, problem.x0(), 1e-5).unwrap();
    println!("derivative audit:\n{report}\n");
    assert!(report.passed());

    let result = solve(&problem, &OuterConfig::default()).unwrap();
    assert_eq!(result.status, TerminationStatus::Kkt);

    let scale = 5.0_f64.sqrt();
    let expected = [-1.0 / scale, 2.0 / scale];
    println!("solution: x = {:?}", result.x_final);
    println!("expected: x = {expected:?}");
    println!("multipliers: s = {:?}", result.s_final);
    assert!((result.x_final[0] - expected[0]).abs() < 1e-5);
    assert!((result.x_final[1] - expected[1]).abs() < 1e-5);
    // the disc constraint is active, the half-plane constraint is not
    // (its multiplier keeps the smoothing level of the last accepted
    // iteration, so it is small rather than exactly zero)
    assert!(result.s_final[0] > 0.1);
    assert!(result.s_final[1] < 1e-3);
}
