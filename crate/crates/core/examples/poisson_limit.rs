//! How fast the Poisson-limit coverage approaches the binomial one as the
//! constellation grows.
//!
//!     cargo run --release --example poisson_limit

use geocov::analysis::{coverage_bpp, coverage_ppp};
use geocov::channel::{db_to_linear, NetworkConfig};
use geocov::quadrature::QuadratureSpec;

fn main() -> geocov::Result<()> {
    let ctx = geocov::GeometryContext::geostationary();
    let phi = f64::to_radians(37.0);
    let quad = QuadratureSpec::default();
    for n in [10, 50, 100, 391] {
        let cfg = NetworkConfig::reference(n, 30.0).with_m(2);
        let mut worst = (0.0f64, 0.0);
        for t in -10..=20 {
            let tau = db_to_linear(f64::from(t));
            let gap = (coverage_ppp(&cfg, &ctx, phi, tau, &quad)?.probability
                - coverage_bpp(&cfg, &ctx, phi, tau, &quad)?.probability)
                .abs();
            if gap > worst.0 {
                worst = (gap, f64::from(t));
            }
        }
        println!("N = {n:>3}: largest gap {:.4} at {} dB", worst.0, worst.1);
    }
    Ok(())
}
