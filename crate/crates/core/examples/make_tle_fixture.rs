//! Writes the synthetic geostationary catalog used by the tests.
//!
//!     cargo run --example make_tle_fixture [PATH]
//!
//! The catalog has 391 objects below one degree of inclination, laid out
//! with the crowded and sparse longitude bands of the real GEO belt, plus
//! inclined geosynchronous objects that the snapshot filter must drop.

use geocov::tle::{synthetic_catalog, SyntheticCatalog};

fn main() -> std::io::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_geo_2023-10-21.tle").into());
    let text = synthetic_catalog(&SyntheticCatalog::default());
    std::fs::write(&path, &text)?;
    println!("wrote {} records to {path}", text.lines().count() / 3);
    Ok(())
}
