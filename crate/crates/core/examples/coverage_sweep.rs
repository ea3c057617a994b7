//! Coverage probability against the SINR threshold, analytic and simulated.
//!
//!     cargo run --release --example coverage_sweep [m]

use geocov::analysis::{coverage_bpp, coverage_ppp};
use geocov::channel::{db_to_linear, NetworkConfig};
use geocov::montecarlo::{estimate_many, McSpec};
use geocov::quadrature::QuadratureSpec;
use geocov::{GeometryContext, TerminalPosition};

fn main() -> geocov::Result<()> {
    let m: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let ctx = GeometryContext::geostationary();
    let cfg = NetworkConfig::reference(100, 20.0).with_m(m);
    let lat = 37.0;
    let phi = f64::to_radians(lat);
    let quad = QuadratureSpec::default();

    let taus_db: Vec<f64> = (-10..=20).step_by(2).map(f64::from).collect();
    let taus: Vec<f64> = taus_db.iter().map(|&t| db_to_linear(t)).collect();
    let terminal = TerminalPosition::from_degrees(&ctx, lat, 137.0)?;
    let mc = estimate_many(&cfg, &ctx, &terminal, &taus, &McSpec::new(100_000, 1))?;

    println!("N = 100, m = {m}, G0/Gn = 20 dB, latitude {lat}");
    println!(
        "{:>6} {:>8} {:>8} {:>8} {:>16}",
        "tau", "binom", "poisson", "sim", "sim 95% CI"
    );
    for ((t, &tau), est) in taus_db.iter().zip(&taus).zip(&mc) {
        let b = coverage_bpp(&cfg, &ctx, phi, tau, &quad)?.probability;
        let p = coverage_ppp(&cfg, &ctx, phi, tau, &quad)?.probability;
        println!(
            "{t:>6} {b:>8.4} {p:>8.4} {:>8.4}   [{:.4}, {:.4}]",
            est.result.probability, est.interval.0, est.interval.1
        );
    }
    Ok(())
}
