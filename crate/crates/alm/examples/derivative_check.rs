//! Audit analytic derivatives against central finite differences.
//!
//! Every registered problem ships hand-written gradients and Hessians;
//! this prints the audit at the standard starting point of each, plus one
//! deliberately corrupted Jacobian to show what a failure looks like.

use alm::{finite_diff_check, register_problems, Matrix, Problem};

fn main() {
    for problem in register_problems() {
        let report = finite_diff_check(&problem, problem.x0(), 1e-5).unwrap();
        println!("{} at x0 = {:?}", problem.name(), problem.x0());
        println!("{report}\n");
        assert!(report.passed());
    }

    // a Jacobian with one entry off by 0.1 fails the audit immediately
    let broken = Problem::new(
        "broken",
        2,
        1,
        vec![0.4, 0.7],
        |x| x[0] + x[1],
        |_| vec![1.0, 1.0],
        |x| vec![1.0 - x[0] * x[0] - x[1] * x[1]],
        |x| Matrix::from_rows(&[&[-2.0 * x[0] + 0.1], &[-2.0 * x[1]]]),
    );
    let report = finite_diff_check(&broken, broken.x0(), 1e-5).unwrap();
    println!("deliberately corrupted Jacobian:");
    println!("{report}");
    assert!(!report.passed());
}
