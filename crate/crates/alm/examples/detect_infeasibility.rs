//! Rapid infeasibility detection on the three infeasible instances.
//!
//! When no feasible point exists the method drives the penalty parameter
//! up and converges to a stationary point of the constraint-violation
//! measure instead. The detection signal is E4 = |grad c * max(0, -c)|,
//! which collapses superlinearly over the final iterations while E3 (the
//! violation itself) stalls at its minimal value.

use alm::{get_problem, solve, OuterConfig, TerminationStatus};

fn main() {
    for name in ["tp1", "tp2", "tp3"] {
        let problem = get_problem(name).unwrap();
        let result = solve(&problem, &OuterConfig::default()).unwrap();
        assert_eq!(result.status, TerminationStatus::InfeasibleStationary);

        println!("{name}: infeasible stationary at {:?}", result.x_final);
        println!("  k    E3 (violation)   E4 (stationarity)   E4 shrink");
        let mut prev_e4: Option<f64> = None;
        for rec in &result.history {
            let shrink = match prev_e4 {
                Some(p) if rec.residuals.e4 > 0.0 => format!("{:8.1}x", p / rec.residuals.e4),
                _ => "       -".to_string(),
            };
            println!(
                "  {:2}   {:14.6e}   {:17.6e}   {shrink}",
                rec.k, rec.residuals.e3, rec.residuals.e4
            );
            prev_e4 = Some(rec.residuals.e4);
        }
        println!();
    }
}
