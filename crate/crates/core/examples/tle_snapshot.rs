//! Real-catalog visibility compared with the binomial model.
//!
//!     cargo run --release --example tle_snapshot [catalog.tle]

use geocov::tle::{average_visible_count, parse_tle, GeoSnapshot, DEFAULT_MAX_INCLINATION_DEG};
use geocov::GeometryContext;

fn main() -> geocov::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_geo_2023-10-21.tle").into());
    let text = std::fs::read_to_string(&path).map_err(|e| geocov::Error::Config(format!("{path}: {e}")))?;
    let parsed = parse_tle(&text, false)?;
    let snap = GeoSnapshot::from_records(&parsed.records, DEFAULT_MAX_INCLINATION_DEG);
    println!(
        "{} records, {} below {DEFAULT_MAX_INCLINATION_DEG} deg inclination",
        snap.source_count,
        snap.len()
    );

    let mut bins = [0usize; 12];
    for l in &snap.longitudes {
        bins[(l.to_degrees() / 30.0) as usize % 12] += 1;
    }
    for (k, b) in bins.iter().enumerate() {
        println!("  {:>3}-{:<3} E  {}", 30 * k, 30 * (k + 1), "#".repeat(*b / 2));
    }

    let ctx = GeometryContext::geostationary();
    let n = snap.len() as f64;
    println!("{:>5} {:>8} {:>8}", "lat", "actual", "N*p_vis");
    for lat in (0..=90).step_by(10) {
        let phi = f64::from(lat).to_radians();
        println!(
            "{lat:>5} {:>8.2} {:>8.2}",
            average_visible_count(&snap, &ctx, phi)?,
            n * ctx.p_vis(phi)?
        );
    }
    Ok(())
}
