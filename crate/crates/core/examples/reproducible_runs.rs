//! Simulation results depend only on the seed, not on the thread count.
//!
//!     cargo run --release --example reproducible_runs

use geocov::channel::NetworkConfig;
use geocov::montecarlo::{estimate, run_trial, trial_rng, McSpec};
use geocov::{GeometryContext, TerminalPosition};

fn main() -> geocov::Result<()> {
    let ctx = GeometryContext::geostationary();
    let cfg = NetworkConfig::reference(100, 20.0).with_m(2);
    let terminal = TerminalPosition::from_degrees(&ctx, 37.0, 137.0)?;

    let first = run_trial(&cfg, &ctx, &terminal, 1.0, &mut trial_rng(42, 0))?;
    println!(
        "trial 0: {:?}, serving {:.0} km, {} interferers, SINR {:.3}",
        first.case,
        first.serving_distance.unwrap_or(f64::NAN),
        first.interferer_distances.len(),
        first.sinr
    );

    for workers in [1, 2, 8] {
        let e = estimate(
            &cfg,
            &ctx,
            &terminal,
            1.0,
            &McSpec::new(200_000, 42).with_workers(workers),
        )?;
        println!("{workers} workers: {} of {} covered", e.successes, e.trials);
    }
    Ok(())
}
