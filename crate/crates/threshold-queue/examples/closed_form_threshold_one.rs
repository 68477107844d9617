//! The threshold-1 policy (fast as soon as anyone waits) admits a complete
//! closed-form case analysis of the equilibrium set. Walk through one
//! instance per regime and check the closed form against the numeric solver.
//!
//! Run with: cargo run --example closed_form_threshold_one

use threshold_queue::{find_equilibria, t1_equilibria, Market, ServicePolicy};

fn main() {
    let cases = [
        (0.5, 0.9, "reward below 1: joining never pays"),
        (0.4, 1.5, "reward in [1,2], slow empty service: balk"),
        (0.2, 3.0, "reward above 2, dip above the reward: balk"),
        (0.25, 3.0, "dip tangent to the reward: balk + touch point"),
        (0.3, 3.0, "dip below the reward: balk + two crossings"),
        (0.3, 4.0, "fast empty service: a single crossing"),
    ];
    for (mu, reward, label) in cases {
        let market = Market::new(reward, 1.0).unwrap();
        let closed = t1_equilibria(mu, market).unwrap();
        let numeric =
            find_equilibria(ServicePolicy::new(1, mu).unwrap(), market, 1e-10).unwrap();
        println!("mu_l = {mu}, R = {reward}  ({label})");
        print!("  closed form: ");
        for p in closed.points() {
            print!("{:.8} [{}] ", p.rate, p.stability);
        }
        println!();
        let worst = closed
            .rates()
            .iter()
            .zip(numeric.rates())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("  numeric solver agrees to {worst:.1e}\n");
    }
}
