//! Laplace transform of the aggregate interference given the serving
//! distance: binomial form, Poisson form, and a simulation estimate.
//!
//!     cargo run --release --example interference_laplace

use geocov::analysis::{laplace_interference_bpp, laplace_interference_ppp};
use geocov::channel::NetworkConfig;
use geocov::distance::DistanceLaw;
use geocov::montecarlo::{laplace_interference_mc, McSpec};
use geocov::quadrature::QuadratureSpec;
use geocov::{GeometryContext, TerminalPosition};

fn main() -> geocov::Result<()> {
    let ctx = GeometryContext::geostationary();
    let lat = 30.0;
    let phi = f64::to_radians(lat);
    let cfg = NetworkConfig::reference(10, 20.0).with_m(2);
    let quad = QuadratureSpec::default();
    let serving = DistanceLaw::serving_bpp(ctx, phi, cfg.n_sats)?;
    let r0 = serving.quantile(0.5)?;
    let band = (serving.quantile(0.495)?, serving.quantile(0.505)?);
    let terminal = TerminalPosition::from_degrees(&ctx, lat, 0.0)?;

    // s on the scale of the inverse received interference power
    let unit = 1.0 / cfg.mean_rx_power(cfg.g_interferer, ctx.r_vis_max());
    let s: Vec<f64> = (0..8).map(|k| unit * 10f64.powf(-1.0 + 0.5 * f64::from(k))).collect();
    let mc = laplace_interference_mc(&cfg, &ctx, &terminal, band, &s, 100_000, &McSpec::new(50_000_000, 3))?;

    println!("N = 10, latitude {lat}, r0 = {r0:.0} km");
    for (&s, (mean, se)) in s.iter().zip(mc) {
        let b = laplace_interference_bpp(&cfg, &ctx, phi, r0, s, &quad)?;
        let p = laplace_interference_ppp(&cfg, &ctx, phi, r0, s, &quad)?;
        println!(
            "s*P = {:>9.3}  binomial {b:.5}  poisson {p:.5}  sim {mean:.5} +- {se:.5}",
            s / unit
        );
    }
    Ok(())
}
