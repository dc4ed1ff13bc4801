//! Grade reproductions of the five reference problems against their
//! reference outcomes: row-zero residuals, termination classes, final
//! points and multipliers, parameter magnitudes, rapid-detection decay and
//! iteration budgets.

use alm::outer::OuterConfig;
use alm::run_reference_suite;

fn main() {
    let reports = run_reference_suite(&OuterConfig::default()).unwrap();
    let mut all = true;
    for report in &reports {
        print!("{report}");
        all &= report.passed();
        let last = report.result.final_record();
        println!(
            "      -> {} | f = {:.6} | {} inner steps | final rho = {:.3e}\n",
            report.result.status,
            last.f_val,
            report.result.total_inner_iters(),
            last.rho
        );
    }
    println!("overall: {}", if all { "pass" } else { "FAIL" });
    assert!(all);
}
