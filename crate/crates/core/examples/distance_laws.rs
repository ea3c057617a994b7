//! Distance laws checked against simulated constellations.
//!
//!     cargo run --release --example distance_laws

use geocov::distance::DistanceLaw;
use geocov::montecarlo::{sample_distances, sample_interferers_conditioned, McSpec};
use geocov::stats::EmpiricalCdf;
use geocov::{GeometryContext, TerminalPosition};

fn main() -> geocov::Result<()> {
    let ctx = GeometryContext::geostationary();
    let (lat, n) = (30.0, 100);
    let phi = f64::to_radians(lat);
    let terminal = TerminalPosition::from_degrees(&ctx, lat, 0.0)?;
    let spec = McSpec::new(100_000, 7);

    let nearest = DistanceLaw::nearest_bpp(ctx, phi, n)?;
    let serving = DistanceLaw::serving_bpp(ctx, phi, n)?;
    let r0 = serving.quantile(0.5)?;
    let interferer = DistanceLaw::interferer_given_r0(ctx, phi, n, r0)?;

    let draws = sample_distances(&ctx, &terminal, n, &spec)?;
    // condition on the serving distance through a narrow quantile band
    let band = (serving.quantile(0.495)?, serving.quantile(0.505)?);
    let inter = sample_interferers_conditioned(&ctx, &terminal, n, band, 100_000, &McSpec::new(50_000_000, 7))?;

    for (label, law, sample) in [
        ("nearest", nearest, draws.nearest),
        ("serving", serving, draws.serving),
        ("interferer", interferer, inter),
    ] {
        let e = EmpiricalCdf::new(sample);
        let ks = e.ks_against(|r| law.cdf(r).unwrap_or(f64::NAN));
        let (lo, hi) = law.support();
        println!(
            "{label:<10} support [{lo:.0}, {hi:.0}] km  median {:.0} km  KS {ks:.4} ({} samples)",
            law.quantile(0.5)?,
            e.len()
        );
    }
    Ok(())
}
