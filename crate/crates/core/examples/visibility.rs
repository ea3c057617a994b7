//! Visible arc and visibility cases versus latitude.
//!
//!     cargo run --example visibility

use geocov::GeometryContext;

fn main() -> geocov::Result<()> {
    let ctx = GeometryContext::geostationary();
    println!(
        "invisibility latitude {:.3} deg, farthest visible satellite {:.1} km",
        ctx.invisibility_latitude().to_degrees(),
        ctx.r_vis_max()
    );
    println!(
        "{:>6} {:>12} {:>8}   {:>24}",
        "lat", "arc km", "p_vis", "P[0 | 1 | >1 visible], N=10"
    );
    for lat in (0..=90).step_by(10) {
        let phi = f64::from(lat).to_radians();
        let cases = ctx.case_probabilities(phi, 10)?;
        println!(
            "{lat:>6} {:>12.1} {:>8.4}   {:.4} | {:.4} | {:.4}",
            ctx.visible_arc_length(phi)?,
            ctx.p_vis(phi)?,
            cases.none,
            cases.one,
            cases.many
        );
    }
    Ok(())
}
