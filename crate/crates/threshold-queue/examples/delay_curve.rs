//! Tabulate the expected sojourn time W over the arrival rate and show the
//! non-monotone dip that threshold service control produces.
//!
//! Run with: cargo run --example delay_curve

use threshold_queue::{waiting_time, waiting_time_raw, DelayFunction, ServicePolicy};

fn main() {
    for (t, mu) in [(3u32, 0.1), (10, 0.2)] {
        let policy = ServicePolicy::new(t, mu).unwrap();
        let df = DelayFunction::new(policy);
        println!("threshold T = {t}, low rate mu_l = {mu}:");
        println!("  {:>8} {:>12}", "lambda", "W");
        for i in 0..=19 {
            let lambda = 0.05 * i as f64;
            let w = df.sojourn(lambda).unwrap();
            println!("  {lambda:>8.2} {w:>12.5}");
        }

        // The dip: W falls while extra arrivals push the server into its
        // fast mode often enough to outweigh the added congestion.
        let samples: Vec<f64> = (1..1000)
            .map(|i| df.sojourn(i as f64 / 1000.0).unwrap())
            .collect();
        let falling = samples.windows(2).filter(|w| w[1] < w[0]).count();
        println!("  falling segments on a 1000-point grid: {falling}\n");
    }

    // The simplified form agrees with the raw expression away from its
    // removable singularity at lambda == mu_l.
    let policy = ServicePolicy::new(3, 0.1).unwrap();
    let simplified = waiting_time(policy, 0.4).unwrap().sojourn;
    let raw = waiting_time_raw(policy, 0.4).unwrap();
    println!("cross-check at (T=3, mu_l=0.1, lambda=0.4):");
    println!("  simplified form: {simplified:.12}");
    println!("  raw form:        {raw:.12}");
}
