//! Maximize the welfare flow and watch the socially optimal arrival rate
//! jump as the reward crosses the minimum of the delay curve: the flow is
//! bimodal there and the winning mode switches.
//!
//! Run with: cargo run --example welfare_jump

use threshold_queue::{compare_optimum_to_equilibria, optimize_welfare, Market, ServicePolicy};

fn main() {
    let policy = ServicePolicy::new(3, 0.1).unwrap();
    println!("optimal rate as the reward sweeps across the dip (T=3, mu_l=0.1):");
    println!("  {:>6} {:>12} {:>12} {:>8}", "R", "lambda*", "S(lambda*)", "bimodal");
    for r in [6.5, 6.9, 7.1, 7.1624, 7.2, 7.5, 9.0] {
        let market = Market::new(r, 1.0).unwrap();
        let opt = optimize_welfare(policy, market).unwrap();
        println!(
            "  {r:>6.4} {:>12.8} {:>12.8} {:>8}",
            opt.rate, opt.value, opt.bimodal
        );
    }

    // Against the equilibria: with several equilibria the optimum lies
    // between the extremes; with a unique one it lies below it.
    println!("\noptimum against the equilibrium range:");
    for (t, mu, r) in [(10u32, 0.2, 21.0), (3, 0.1, 20.0), (1, 0.3, 4.0)] {
        let c = compare_optimum_to_equilibria(
            ServicePolicy::new(t, mu).unwrap(),
            Market::new(r, 1.0).unwrap(),
        )
        .unwrap();
        println!(
            "  T={t:<3} mu_l={mu:<5} R={r:<5} eq range [{:.6}, {:.6}]  lambda* = {:.6}  within: {}",
            c.eq_min, c.eq_max, c.optimum.rate, c.within_envelope
        );
    }
}
