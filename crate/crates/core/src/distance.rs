//! Distance laws from the terminal to the constellation.
//!
//! Every law here is a function of the arc fraction `psi(r)`, so the CDFs,
//! densities and quantiles all go through [`GeometryContext::psi`] and its
//! closed-form inverse.

use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{check_latitude, check_within, GeometryContext};

/// Which distance a [`DistanceLaw`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistanceKind {
    /// Nearest satellite, visible or not (binomial point process).
    NearestBpp,
    /// Serving satellite, i.e. nearest given at least one is visible.
    ServingBpp,
    /// An interferer given the serving distance `r0`.
    InterfererGivenR0,
    /// Nearest satellite in the Poisson limit.
    NearestPpp,
    /// Serving satellite in the Poisson limit.
    ServingPpp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceLaw {
    kind: DistanceKind,
    ctx: GeometryContext,
    phi: f64,
    n_sats: usize,
    r0: Option<f64>,
    /// `psi(r_vis_max)`, i.e. `p_vis`.
    psi_vis: f64,
    /// `psi(r0)` for the interferer law, zero otherwise.
    psi0: f64,
}

impl DistanceLaw {
    pub fn new(kind: DistanceKind, ctx: GeometryContext, phi: f64, n_sats: usize, r0: Option<f64>) -> Result<Self> {
        check_latitude(phi)?;
        if n_sats == 0 {
            return Err(Error::domain("a network needs at least one satellite"));
        }
        let needs_arc = matches!(
            kind,
            DistanceKind::ServingBpp | DistanceKind::ServingPpp | DistanceKind::InterfererGivenR0
        );
        if needs_arc && !ctx.sees_orbit(phi) {
            return Err(Error::domain(format!(
                "no visible arc at latitude {:.3} deg",
                phi.to_degrees()
            )));
        }
        let psi_vis = ctx.p_vis(phi)?;
        let psi0 = match (kind, r0) {
            (DistanceKind::InterfererGivenR0, Some(r0)) => {
                check_within(r0, ctx.r_min(phi), ctx.r_vis_max(), "serving distance")?;
                ctx.psi_unchecked(r0, phi).min(psi_vis)
            }
            (DistanceKind::InterfererGivenR0, None) => {
                return Err(Error::domain("interferer law needs a serving distance"));
            }
            (_, Some(_)) => {
                return Err(Error::domain("only the interferer law takes a serving distance"));
            }
            _ => 0.0,
        };
        Ok(Self {
            kind,
            ctx,
            phi,
            n_sats,
            r0,
            psi_vis,
            psi0,
        })
    }

    pub fn nearest_bpp(ctx: GeometryContext, phi: f64, n_sats: usize) -> Result<Self> {
        Self::new(DistanceKind::NearestBpp, ctx, phi, n_sats, None)
    }

    pub fn serving_bpp(ctx: GeometryContext, phi: f64, n_sats: usize) -> Result<Self> {
        Self::new(DistanceKind::ServingBpp, ctx, phi, n_sats, None)
    }

    pub fn interferer_given_r0(ctx: GeometryContext, phi: f64, n_sats: usize, r0: f64) -> Result<Self> {
        Self::new(DistanceKind::InterfererGivenR0, ctx, phi, n_sats, Some(r0))
    }

    pub fn nearest_ppp(ctx: GeometryContext, phi: f64, n_sats: usize) -> Result<Self> {
        Self::new(DistanceKind::NearestPpp, ctx, phi, n_sats, None)
    }

    pub fn serving_ppp(ctx: GeometryContext, phi: f64, n_sats: usize) -> Result<Self> {
        Self::new(DistanceKind::ServingPpp, ctx, phi, n_sats, None)
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n_sats(&self) -> usize {
        self.n_sats
    }

    pub fn r0(&self) -> Option<f64> {
        self.r0
    }

    /// Closed support `[lo, hi]` in km.
    pub fn support(&self) -> (f64, f64) {
        let ctx = &self.ctx;
        match self.kind {
            DistanceKind::NearestBpp | DistanceKind::NearestPpp => (ctx.r_min(self.phi), ctx.r_max(self.phi)),
            DistanceKind::ServingBpp | DistanceKind::ServingPpp => (ctx.r_min(self.phi), ctx.r_vis_max()),
            DistanceKind::InterfererGivenR0 => (self.r0.expect("checked"), ctx.r_vis_max()),
        }
    }

    /// Support expressed as arc fractions.
    pub fn psi_support(&self) -> (f64, f64) {
        match self.kind {
            DistanceKind::NearestBpp | DistanceKind::NearestPpp => (0.0, 1.0),
            DistanceKind::ServingBpp | DistanceKind::ServingPpp => (0.0, self.psi_vis),
            DistanceKind::InterfererGivenR0 => (self.psi0, self.psi_vis),
        }
    }

    fn n(&self) -> f64 {
        self.n_sats as f64
    }

    /// `P[R <= r]` for the nearest-distance law, as a function of `psi(r)`.
    fn nearest_bpp_cdf(&self, psi: f64) -> f64 {
        -(self.n() * (-psi).ln_1p()).exp_m1()
    }

    fn nearest_ppp_cdf(&self, psi: f64) -> f64 {
        -(-self.n() * psi).exp_m1()
    }

    /// CDF as a function of the arc fraction inside the support.
    pub fn cdf_of_psi(&self, psi: f64) -> f64 {
        let (lo, hi) = self.psi_support();
        if psi <= lo {
            return 0.0;
        }
        if psi >= hi && self.kind != DistanceKind::NearestPpp {
            return 1.0;
        }
        match self.kind {
            DistanceKind::NearestBpp => self.nearest_bpp_cdf(psi),
            DistanceKind::ServingBpp => self.nearest_bpp_cdf(psi) / self.nearest_bpp_cdf(self.psi_vis),
            DistanceKind::InterfererGivenR0 => (psi - self.psi0) / (self.psi_vis - self.psi0),
            DistanceKind::NearestPpp => self.nearest_ppp_cdf(psi.min(1.0)),
            DistanceKind::ServingPpp => self.nearest_ppp_cdf(psi) / self.nearest_ppp_cdf(self.psi_vis),
        }
    }

    /// `dF / dpsi` inside the support.
    pub fn density_of_psi(&self, psi: f64) -> f64 {
        let n = self.n();
        match self.kind {
            DistanceKind::NearestBpp => n * (1.0 - psi).powf(n - 1.0),
            DistanceKind::ServingBpp => n * (1.0 - psi).powf(n - 1.0) / self.nearest_bpp_cdf(self.psi_vis),
            DistanceKind::InterfererGivenR0 => 1.0 / (self.psi_vis - self.psi0),
            DistanceKind::NearestPpp => n * (-n * psi).exp(),
            DistanceKind::ServingPpp => n * (-n * psi).exp() / self.nearest_ppp_cdf(self.psi_vis),
        }
    }

    /// `P[X <= r]`; zero below the support and one above it.
    ///
    /// The Poisson-limit nearest distance keeps an atom of mass `e^{-N}` at
    /// `r_max` for the event that the arc holds no satellite.
    pub fn cdf(&self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::domain(format!("distance must be finite, got {r}")));
        }
        let (lo, hi) = self.support();
        if r < lo {
            return Ok(0.0);
        }
        if r >= hi {
            return Ok(1.0);
        }
        Ok(self.cdf_of_psi(self.ctx.psi_unchecked(r, self.phi)))
    }

    /// Density in 1/km. Returns `+inf` at `r_min` and `r_max`, where the arc
    /// kernel has inverse square-root singularities; integrate through
    /// [`crate::analysis::arc_integral`] instead of sampling this there.
    pub fn pdf(&self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::domain(format!("distance must be finite, got {r}")));
        }
        let (lo, hi) = self.support();
        if r < lo || r > hi {
            return Ok(0.0);
        }
        let kernel = psi_derivative(&self.ctx, r, self.phi);
        if kernel.is_infinite() {
            return Ok(f64::INFINITY);
        }
        Ok(self.density_of_psi(self.ctx.psi_unchecked(r, self.phi)) * kernel)
    }

    /// Closed-form inverse CDF for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(format!("quantile level {u} outside [0, 1]")));
        }
        let n = self.n();
        let psi = match self.kind {
            DistanceKind::NearestBpp => -((-u).ln_1p() / n).exp_m1(),
            DistanceKind::ServingBpp => {
                let scale = self.nearest_bpp_cdf(self.psi_vis);
                -((-u * scale).ln_1p() / n).exp_m1()
            }
            DistanceKind::InterfererGivenR0 => self.psi0 + u * (self.psi_vis - self.psi0),
            DistanceKind::NearestPpp => (-(-u).ln_1p() / n).min(1.0),
            DistanceKind::ServingPpp => {
                let scale = self.nearest_ppp_cdf(self.psi_vis);
                -(-u * scale).ln_1p() / n
            }
        };
        let (lo, hi) = self.psi_support();
        let (rlo, rhi) = self.support();
        Ok(self.ctx.r_from_psi(psi.clamp(lo, hi), self.phi).clamp(rlo, rhi))
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u).expect("u in [0, 1)")
    }
}

/// `dpsi/dr = 2 r / (pi sqrt(v1 - (v2 - r^2)^2))`, with the radicand written
/// as `(r^2 - r_min^2)(r_max^2 - r^2)`.
pub fn psi_derivative(ctx: &GeometryContext, r: f64, phi: f64) -> f64 {
    let (rmin, rmax) = (ctx.r_min(phi), ctx.r_max(phi));
    let radicand = (r - rmin) * (r + rmin) * (rmax - r) * (rmax + r);
    if radicand <= 0.0 {
        return f64::INFINITY;
    }
    2.0 * r / (PI * radicand.sqrt())
}
