//! Hock-Schittkowski problem 13 (tp5): the minimizer x* = (1, 0) is not a
//! KKT point because the active constraint gradients are linearly
//! dependent there - no bounded multipliers exist.
//!
//! The method recognizes this terminus by its parameter signature: the
//! penalty grows without bound while the smoothing parameter collapses,
//! and the run stops on the second branch of the stopping test with a tiny
//! residual violation. Compare with tp4, where the penalty stays bounded.

use alm::cli::write_table;
use alm::{get_problem, solve, OuterConfig, TerminationStatus};

fn main() {
    let problem = get_problem("tp5").unwrap();
    let result = solve(&problem, &OuterConfig::default()).unwrap();

    let mut stdout = std::io::stdout();
    write_table(&result, &mut stdout).unwrap();

    assert_eq!(result.status, TerminationStatus::SingularStationary);
    let last = result.final_record();
    println!(
        "\nsingular stationary point near (1, 0): x = {:?}\n\
         penalty grew to rho = {:.3e} while mu fell to {:.3e};\n\
         the violation E3 = {:.3e} is tiny but its stationarity measure\n\
         E4 = {:.3e} crossed the tolerance first, so no KKT certificate exists",
        result.x_final, last.rho, last.mu, last.residuals.e3, last.residuals.e4
    );
}
