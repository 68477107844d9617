//! Run the discrete-event simulation as a statistical check on the analytic
//! delay function: the analytic W should land inside the simulated
//! confidence interval.
//!
//! Run with: cargo run --example simulate_vs_analytic

use threshold_queue::{simulate, waiting_time, ServicePolicy, SimConfig};

fn main() {
    println!(
        "  {:>3} {:>6} {:>6} {:>12} {:>12} {:>10} {:>6}",
        "T", "mu_l", "lambda", "analytic W", "simulated", "95% hw", "inside"
    );
    for (t, mu, lambda) in [
        (1u32, 0.25, 1.0 / 3.0),
        (3, 0.1, 0.4),
        (10, 0.2, 0.6),
        (5, 0.5, 0.8),
    ] {
        let policy = ServicePolicy::new(t, mu).unwrap();
        let config = SimConfig::new(policy, lambda, 200_000, 2_000, 7).unwrap();
        let est = simulate(&config).unwrap();
        let w = waiting_time(policy, lambda).unwrap().sojourn;
        let inside = (est.mean_sojourn - w).abs() <= est.half_width_95;
        println!(
            "  {t:>3} {mu:>6.2} {lambda:>6.3} {w:>12.6} {:>12.6} {:>10.6} {inside:>6}",
            est.mean_sojourn, est.half_width_95
        );
    }

    // The fraction of time spent serving at the low rate is also observable
    // and matches the stationary distribution.
    let policy = ServicePolicy::new(10, 0.2).unwrap();
    let config = SimConfig::new(policy, 0.6, 200_000, 2_000, 42).unwrap();
    let est = simulate(&config).unwrap();
    let dist = threshold_queue::stationary_distribution(policy, 0.6, 1e-14).unwrap();
    println!(
        "\nlow-rate busy fraction at (T=10, mu_l=0.2, lambda=0.6): simulated {:.5} +/- {:.5}, \
         stationary {:.5}",
        est.fraction_time_low_rate,
        est.fraction_half_width_95,
        dist.low_rate_busy_fraction(policy)
    );
}
