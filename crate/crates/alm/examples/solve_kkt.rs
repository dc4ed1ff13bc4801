//! Solve the well-posed single-variable problem tp4 (min x s.t. x^2 >= 1,
//! x >= 2) from the infeasible start x = -4 and print the iteration table.
//!
//! The run ends at the KKT point x* = 2 with multipliers s* = (0, 1): the
//! first constraint is inactive and the bound x >= 2 carries the whole
//! objective gradient.

use alm::cli::write_table;
use alm::{get_problem, solve, OuterConfig, TerminationStatus};

fn main() {
    let problem = get_problem("tp4").unwrap();
    let config = OuterConfig::default();
    let result = solve(&problem, &config).unwrap();

    let mut stdout = std::io::stdout();
    write_table(&result, &mut stdout).unwrap();

    assert_eq!(result.status, TerminationStatus::Kkt);
    assert!((result.x_final[0] - 2.0).abs() < 1e-4);
    assert!((result.s_final[1] - 1.0).abs() < 1e-4);
    println!(
        "\nKKT point reached in {} outer iterations ({} inner steps total)",
        result.history.len() - 1,
        result.total_inner_iters()
    );
}
