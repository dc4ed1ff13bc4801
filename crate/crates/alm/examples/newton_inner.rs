//! Exact-Hessian inner iterations.
//!
//! When a problem carries Hessian callbacks the subproblems can be solved
//! by damped Newton steps instead of BFGS. On a single subproblem the
//! gradient norms of the final Newton steps contract quadratically; this
//! example shows that tail and then runs the full method in Newton mode.

use alm::inner::{minimize_subproblem, InnerConfig, InnerMethod};
use alm::{get_problem, solve, OuterConfig, SmoothingParams};

fn main() {
    let problem = get_problem("tp1").unwrap();

    // one subproblem, solved tightly so the quadratic tail is visible
    let params = SmoothingParams::new(1e-10, 1.0).unwrap();
    let config = InnerConfig {
        method: InnerMethod::Newton,
        max_iters: 60,
        ..Default::default()
    };
    let s = vec![1.0; problem.m()];
    let (res, _) = minimize_subproblem(&problem, &s, &params, problem.x0(), &config, None).unwrap();

    println!("Newton steps on the first tp1 subproblem (mu = 1e-10):");
    println!("   j   |g|_inf before    step");
    for (j, step) in res.steps.iter().enumerate() {
        println!(
            "  {:2}   {:14.6e}    alpha = {}",
            j, step.grad_inf_before, step.alpha
        );
    }
    println!("       {:14.6e}    (final)\n", res.final_scaled_grad_inf);

    let ratios: Vec<f64> = res
        .steps
        .iter()
        .map(|s| s.grad_inf_before)
        .chain(std::iter::once(res.final_scaled_grad_inf))
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0] < 1e-1 && w[1] > 1e-14)
        .map(|w| w[1] / (w[0] * w[0]))
        .collect();
    println!("quadratic-decay ratios |g+| / |g|^2 over the tail: {ratios:?}\n");

    // the full method with Newton inner iterations
    let config = OuterConfig {
        inner: InnerConfig {
            method: InnerMethod::Newton,
            ..Default::default()
        },
        ..Default::default()
    };
    for name in ["tp1", "tp4", "tp5"] {
        let problem = get_problem(name).unwrap();
        let result = solve(&problem, &config).unwrap();
        println!(
            "{name}: {} at {:?} ({} inner steps)",
            result.status,
            result.x_final,
            result.total_inner_iters()
        );
        assert!(result.status.is_solved());
    }
}
