//! Coverage against constellation size and terminal latitude.
//!
//! More satellites bring both closer servers and more interferers, so
//! coverage peaks at a finite N. Toward high latitudes the visible arc
//! shrinks and with it the interference, until nothing is visible at all.
//!
//!     cargo run --release --example network_design

use geocov::analysis::coverage_bpp;
use geocov::channel::NetworkConfig;
use geocov::quadrature::QuadratureSpec;

fn main() -> geocov::Result<()> {
    let ctx = geocov::GeometryContext::geostationary();
    let quad = QuadratureSpec::default();
    let phi = f64::to_radians(37.0);

    println!("coverage at 0 dB, m = 2, G0/Gn = 30 dB, latitude 37");
    for n in [10, 25, 50, 100, 200, 300, 400, 600] {
        let cfg = NetworkConfig::reference(n, 30.0).with_m(2);
        println!(
            "  N = {n:>3}  {:.4}",
            coverage_bpp(&cfg, &ctx, phi, 1.0, &quad)?.probability
        );
    }

    println!("coverage at 0 dB, m = 1, G0/Gn = 20 dB");
    for lat in (0..=85).step_by(5) {
        let phi = f64::from(lat).to_radians();
        let row: Vec<String> = [100, 200]
            .iter()
            .map(|&n| {
                let cfg = NetworkConfig::reference(n, 20.0);
                coverage_bpp(&cfg, &ctx, phi, 1.0, &quad).map(|c| format!("{:.4}", c.probability))
            })
            .collect::<geocov::Result<_>>()?;
        println!("  lat {lat:>2}  N=100 {}  N=200 {}", row[0], row[1]);
    }
    Ok(())
}
