//! Perturb the arrival rate away from each equilibrium and let damped
//! best-response dynamics run: stable equilibria pull the rate back,
//! unstable ones repel it toward a stable neighbor.
//!
//! Run with: cargo run --example response_dynamics

use threshold_queue::{best_response_dynamics, find_equilibria, Market, ServicePolicy};

fn main() {
    let policy = ServicePolicy::new(3, 0.1).unwrap();
    let market = Market::new(9.0, 1.0).unwrap();
    let set = find_equilibria(policy, market, 1e-10).unwrap();
    println!("equilibria of (T=3, mu_l=0.1, R=9):");
    for p in set.points() {
        println!("  {:.8} [{}]", p.rate, p.stability);
    }

    println!("\ntraces from perturbed starts (damping 0.1):");
    for p in set.points() {
        for delta in [-0.01, 0.01] {
            let start = p.rate + delta;
            if start < 0.0 {
                continue;
            }
            let trace = best_response_dynamics(policy, market, start, 0.1, 2000).unwrap();
            let head: Vec<String> = trace
                .iterates
                .iter()
                .take(6)
                .map(|x| format!("{x:.4}"))
                .collect();
            match trace.converged_to {
                Some(end) => println!(
                    "  start {start:.4} -> {} ... settled at {end:.6} after {} steps",
                    head.join(" -> "),
                    trace.iterates.len() - 1
                ),
                None => println!("  start {start:.4} -> {} ... still moving", head.join(" -> ")),
            }
        }
    }
}
