//! Enumerate all symmetric equilibrium arrival rates of an instance and
//! label their stability.
//!
//! Run with: cargo run --example equilibria

use threshold_queue::{find_equilibria, EquilibriumPolynomial, Market, ServicePolicy};

fn main() {
    let instances = [
        (3u32, 0.1, 9.0, 1.0),
        (10, 0.2, 21.0, 1.0),
        (4, 0.3, 0.5, 1.0),  // reward below the plain-queue floor
        (1, 0.3, 4.0, 0.5),  // potential rate caps the unique crossing
    ];
    for (t, mu, reward, cap) in instances {
        let policy = ServicePolicy::new(t, mu).unwrap();
        let market = Market::new(reward, cap).unwrap();
        let set = find_equilibria(policy, market, 1e-10).unwrap();
        println!("T = {t}, mu_l = {mu}, R = {reward}, Lambda = {cap}:");
        for p in set.points() {
            println!(
                "  rate {:<12.8} {:<9} {:<9} residual {:.2e}",
                p.rate,
                p.kind.to_string(),
                p.stability.to_string(),
                p.residual
            );
        }

        // The variation count of the indifference polynomial bounds the
        // interior count from above (Fourier-Budan).
        let poly = EquilibriumPolynomial::new(policy, reward).unwrap();
        let v0 = poly.sign_variations(0.0).variations;
        let v1 = poly.sign_variations(1.0).variations;
        println!(
            "  interior crossings: {} <= V(0) - V(1) = {} - {}\n",
            set.interior_count(),
            v0,
            v1
        );
    }
}
