//! Regenerate the bundled parameter studies as CSV files, one per preset.
//! Equivalent to `threshold-queue sweep --preset figN --out figN.csv`.
//!
//! Run with: cargo run --example figure_sweeps [out-dir]

use threshold_queue::cli::{preset_sweep_spec, run_sweep};

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/studies".to_string());
    std::fs::create_dir_all(&out_dir).expect("create output directory");

    for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
        let spec = preset_sweep_spec(name).expect("known preset");
        let csv = run_sweep(&spec).expect("sweep runs");
        let path = format!("{out_dir}/{name}.csv");
        std::fs::write(&path, &csv).expect("write csv");
        println!(
            "{path}: {} rows, varying {:?} over [{}, {}]",
            csv.lines().count() - 1,
            spec.vary,
            spec.start,
            spec.stop
        );
    }
    println!("\nplot with any CSV tool; columns are listed in each header row");
}
