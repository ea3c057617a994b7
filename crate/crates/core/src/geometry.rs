//! Geometry of the geostationary circle seen from a terminal at latitude `phi`.
//!
//! Lengths are kilometres and angles are radians. The Earth is a sphere and
//! every satellite sits on the equatorial circle of radius `r_earth + altitude`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Mean Earth radius used throughout, km.
pub const EARTH_RADIUS_KM: f64 = 6_378.0;
/// Geostationary altitude above the surface, km.
pub const GEO_ALTITUDE_KM: f64 = 35_786.0;

/// Relative tolerance on distances checked against a support interval.
pub const SUPPORT_REL_TOL: f64 = 1e-9;

/// Earth radius and orbit altitude with the latitude-independent constants
/// derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryContext {
    r_earth: f64,
    altitude: f64,
    orbit_radius: f64,
    phi_inv: f64,
    r_vis_max: f64,
    v2: f64,
}

impl GeometryContext {
    pub fn new(r_earth: f64, altitude: f64) -> Result<Self> {
        if !(r_earth.is_finite() && r_earth > 0.0) {
            return Err(Error::domain(format!("earth radius must be positive, got {r_earth}")));
        }
        if !(altitude.is_finite() && altitude > 0.0) {
            return Err(Error::domain(format!("altitude must be positive, got {altitude}")));
        }
        let orbit_radius = r_earth + altitude;
        Ok(Self {
            r_earth,
            altitude,
            orbit_radius,
            phi_inv: (r_earth / orbit_radius).acos(),
            r_vis_max: (altitude * altitude + 2.0 * altitude * r_earth).sqrt(),
            v2: orbit_radius * orbit_radius + r_earth * r_earth,
        })
    }

    /// Spherical Earth of radius 6,378 km with the satellites at 35,786 km.
    pub fn geostationary() -> Self {
        Self::new(EARTH_RADIUS_KM, GEO_ALTITUDE_KM).expect("constants are valid")
    }

    pub fn r_earth(&self) -> f64 {
        self.r_earth
    }

    pub fn altitude(&self) -> f64 {
        self.altitude
    }

    pub fn orbit_radius(&self) -> f64 {
        self.orbit_radius
    }

    /// Latitude beyond which no part of the orbit is above the horizon.
    pub fn invisibility_latitude(&self) -> f64 {
        self.phi_inv
    }

    /// Distance from any terminal to an endpoint of its visible arc. The
    /// value does not depend on latitude.
    pub fn r_vis_max(&self) -> f64 {
        self.r_vis_max
    }

    pub fn v2(&self) -> f64 {
        self.v2
    }

    /// `4 (r_E + a)^2 r_E^2 cos^2(phi)`.
    pub fn v1(&self, phi: f64) -> f64 {
        let c = 2.0 * self.orbit_radius * self.r_earth * phi.cos();
        c * c
    }

    fn sqrt_v1(&self, phi: f64) -> f64 {
        2.0 * self.orbit_radius * self.r_earth * phi.cos().abs()
    }

    /// True when `|phi|` is strictly below the invisibility latitude.
    pub fn sees_orbit(&self, phi: f64) -> bool {
        phi.abs() < self.phi_inv
    }

    /// Central angle EOM, half the angular width of the visible arc.
    fn half_visible_angle(&self, phi: f64) -> f64 {
        if !self.sees_orbit(phi) {
            return 0.0;
        }
        let ratio = self.orbit_radius / self.r_earth;
        let sec = 1.0 / phi.cos();
        let inner = (1.0 - sec * sec / (ratio * ratio)).max(0.0);
        inner.sqrt().asin()
    }

    /// Length of the visible arc in km; exactly zero for `|phi| >= phi_inv`.
    pub fn visible_arc_length(&self, phi: f64) -> Result<f64> {
        check_latitude(phi)?;
        Ok(2.0 * self.orbit_radius * self.half_visible_angle(phi))
    }

    /// Probability that a uniformly placed satellite is visible.
    pub fn p_vis(&self, phi: f64) -> Result<f64> {
        check_latitude(phi)?;
        Ok(self.half_visible_angle(phi) / PI)
    }

    /// Probabilities of seeing no, exactly one, and more than one satellite.
    pub fn case_probabilities(&self, phi: f64, n_sats: usize) -> Result<CaseProbabilities> {
        if n_sats == 0 {
            return Err(Error::domain("a network needs at least one satellite"));
        }
        let p = self.p_vis(phi)?;
        let n = n_sats as i32;
        let none = (1.0 - p).powi(n);
        let one = n as f64 * p * (1.0 - p).powi(n - 1);
        let many = (1.0 - none - one).max(0.0);
        Ok(CaseProbabilities { none, one, many })
    }

    /// Distance to the nearest point of the orbit.
    pub fn r_min(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let d = self.orbit_radius - self.r_earth * c;
        let z = self.r_earth * s;
        (d * d + z * z).sqrt()
    }

    /// Distance to the farthest point of the orbit.
    pub fn r_max(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let d = self.orbit_radius + self.r_earth * c;
        let z = self.r_earth * s;
        (d * d + z * z).sqrt()
    }

    /// Fraction of the orbit lying within distance `r` of the terminal.
    pub fn psi(&self, r: f64, phi: f64) -> Result<f64> {
        check_latitude(phi)?;
        let (lo, hi) = (self.r_min(phi), self.r_max(phi));
        check_within(r, lo, hi, "distance")?;
        Ok(self.psi_unchecked(r, phi))
    }

    /// `psi` without domain checks; saturates outside `[r_min, r_max]`.
    pub(crate) fn psi_unchecked(&self, r: f64, phi: f64) -> f64 {
        if r <= self.r_min(phi) {
            return 0.0;
        }
        if r >= self.r_max(phi) {
            return 1.0;
        }
        // Half-angle form of acos((v2 - r^2) / sqrt(v1)), measured from the
        // nearer endpoint so neither end loses digits.
        let s = self.sqrt_v1(phi);
        let (rmin, rmax) = (self.r_min(phi), self.r_max(phi));
        let near = (r - rmin) * (r + rmin);
        let u = if near <= s {
            2.0 * (near / (2.0 * s)).sqrt().min(1.0).asin()
        } else {
            let far = (rmax - r) * (rmax + r);
            PI - 2.0 * (far / (2.0 * s)).sqrt().min(1.0).asin()
        };
        u / PI
    }

    /// Inverse of `psi`: the distance whose arc fraction is `fraction`.
    pub fn r_from_psi(&self, fraction: f64, phi: f64) -> f64 {
        let u = PI * fraction.clamp(0.0, 1.0);
        self.r_from_angle(u, phi)
    }

    /// Distance at arc angle `u = pi * psi`.
    pub(crate) fn r_from_angle(&self, u: f64, phi: f64) -> f64 {
        // v2 - sqrt(v1) cos u, rewritten around the nearest point to keep
        // precision where cos u is close to one.
        let r_min = self.r_min(phi);
        let half = (0.5 * u).sin();
        (r_min * r_min + 2.0 * self.sqrt_v1(phi) * half * half).sqrt()
    }

    /// Probability that a satellite outside the serving distance `r0` falls in
    /// the visible arc, i.e. can interfere.
    pub fn p_int(&self, r0: f64, phi: f64) -> Result<f64> {
        check_latitude(phi)?;
        check_within(r0, self.r_min(phi), self.r_vis_max, "serving distance")?;
        let psi_vis = self.psi_unchecked(self.r_vis_max, phi);
        let psi0 = self.psi_unchecked(r0, phi).min(psi_vis);
        Ok((psi_vis - psi0) / (1.0 - psi0))
    }

    /// Cartesian position of a satellite at azimuth `azimuth`.
    pub fn satellite_position(&self, azimuth: f64) -> [f64; 3] {
        let (s, c) = azimuth.sin_cos();
        [self.orbit_radius * c, self.orbit_radius * s, 0.0]
    }
}

/// Case probabilities for the number of visible satellites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseProbabilities {
    /// No satellite visible.
    pub none: f64,
    /// Exactly one visible satellite, serving without interference.
    pub one: f64,
    /// A serving satellite and at least one interferer.
    pub many: f64,
}

/// A terminal on the Earth's surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminalPosition {
    latitude: f64,
    longitude: f64,
    cartesian: [f64; 3],
}

impl TerminalPosition {
    pub fn new(ctx: &GeometryContext, latitude: f64, longitude: f64) -> Result<Self> {
        check_latitude(latitude)?;
        if !longitude.is_finite() {
            return Err(Error::domain("longitude must be finite"));
        }
        let longitude = longitude.rem_euclid(TAU);
        let (sp, cp) = latitude.sin_cos();
        let (st, ct) = longitude.sin_cos();
        let r = ctx.r_earth();
        Ok(Self {
            latitude,
            longitude,
            cartesian: [r * cp * ct, r * cp * st, r * sp],
        })
    }

    pub fn from_degrees(ctx: &GeometryContext, latitude_deg: f64, longitude_deg: f64) -> Result<Self> {
        Self::new(ctx, latitude_deg.to_radians(), longitude_deg.to_radians())
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn cartesian(&self) -> [f64; 3] {
        self.cartesian
    }

    pub fn distance_to(&self, point: [f64; 3]) -> f64 {
        let d = sub(point, self.cartesian);
        dot(d, d).sqrt()
    }

    /// Horizon test: the line of sight to `point` is not below the local
    /// horizontal plane.
    pub fn sees(&self, point: [f64; 3]) -> bool {
        dot(sub(point, self.cartesian), self.cartesian) >= 0.0
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn check_latitude(phi: f64) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::domain(format!("latitude must be finite, got {phi}")));
    }
    if phi.abs() > FRAC_PI_2 * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "latitude {:.6} deg outside [-90, 90]",
            phi.to_degrees()
        )));
    }
    Ok(())
}

pub(crate) fn check_within(r: f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    let tol = SUPPORT_REL_TOL * hi.abs().max(1.0);
    if !r.is_finite() || r < lo - tol || r > hi + tol {
        return Err(Error::domain(format!("{what} {r} km outside [{lo}, {hi}]")));
    }
    Ok(())
}
