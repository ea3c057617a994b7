//! Interference Laplace transforms and coverage probabilities.
//!
//! Every integral against the orbit-arc kernel
//! `(2r/pi) / sqrt(v1 - (v2 - r^2)^2) dr` is evaluated after substituting
//! `u = pi * psi(r, phi)`. Under that change of variable the kernel is exactly
//! `du / pi` and the inverse square-root singularities at `r_min` and `r_max`
//! disappear, so plain Gauss-Kronrod panels on `u` converge quickly.
//!
//! Gains and powers stay linear throughout; thresholds are linear SINR ratios.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::channel::{alternating_binomial, binomial, linear_to_db, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{check_latitude, check_within, GeometryContext};
use crate::quadrature::{try_integrate, Integral, QuadratureSpec};

/// Tolerance for tightening nested integrals relative to the outer one.
const INNER_TIGHTENING: f64 = 10.0;
/// Largest excursion outside [0, 1] accepted as rounding in a coverage value.
const PROBABILITY_SLACK: f64 = 1e-9;

/// How a coverage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BppAnalytic,
    PppAnalytic,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::BppAnalytic => "bpp",
            Method::PppAnalytic => "ppp",
            Method::MonteCarlo => "mc",
        }
    }
}

/// A coverage probability with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub threshold_db: f64,
    pub probability: f64,
    pub method: Method,
    /// Quadrature error estimate, or the MC 95% half-width.
    pub error_estimate: f64,
    /// Digest of the [`NetworkConfig`] that produced the value.
    pub config_digest: String,
    /// Set when the terminal sees no part of the orbit.
    pub no_visible_arc: bool,
}

impl CoverageResult {
    fn invisible(cfg: &NetworkConfig, tau: f64, method: Method) -> Self {
        Self {
            threshold_db: linear_to_db(tau),
            probability: 0.0,
            method,
            error_estimate: 0.0,
            config_digest: cfg.digest(),
            no_visible_arc: true,
        }
    }
}

/// Integrates `g(r, psi)` against `dpsi` for `psi` in `[psi_lo, psi_hi]`.
pub(crate) fn integrate_arc<F>(
    ctx: &GeometryContext,
    phi: f64,
    psi_lo: f64,
    psi_hi: f64,
    spec: &QuadratureSpec,
    mut g: F,
) -> Result<Integral>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let (u_lo, u_hi) = (PI * psi_lo, PI * psi_hi);
    // The tolerance applies to the returned value, which is the u-integral
    // divided by pi.
    let spec_u = QuadratureSpec {
        abs_tol: spec.abs_tol * PI,
        ..*spec
    };
    let res = try_integrate(|u| g(ctx.r_from_angle(u, phi), u / PI), u_lo, u_hi, &spec_u).map_err(|e| match e {
        Error::Convergence {
            estimate,
            error_estimate,
            subdivisions,
        } => Error::Convergence {
            estimate: estimate / PI,
            error_estimate: error_estimate / PI,
            subdivisions,
        },
        other => other,
    })?;
    Ok(Integral {
        value: res.value / PI,
        error: res.error / PI,
        evaluations: res.evaluations,
    })
}

/// `integral_{r_lo}^{r_hi} g(r) (2r/pi) / sqrt(v1 - (v2 - r^2)^2) dr`.
///
/// Over the whole support `[r_min, r_max]` the kernel alone integrates to one,
/// and over `[r_min, r_vis_max]` to `p_vis`.
pub fn arc_integral<G>(
    ctx: &GeometryContext,
    phi: f64,
    r_lo: f64,
    r_hi: f64,
    mut g: G,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    G: FnMut(f64) -> f64,
{
    check_latitude(phi)?;
    let (rmin, rmax) = (ctx.r_min(phi), ctx.r_max(phi));
    check_within(r_lo, rmin, rmax, "lower bound")?;
    check_within(r_hi, rmin, rmax, "upper bound")?;
    if r_lo > r_hi {
        return Err(Error::domain("arc integral bounds are reversed"));
    }
    let psi_lo = ctx.psi_unchecked(r_lo, phi);
    let psi_hi = ctx.psi_unchecked(r_hi, phi);
    integrate_arc(ctx, phi, psi_lo, psi_hi, spec, |r, _| Ok(g(r)))
}

/// `Omega_1(r) = -1/2 atan((v2 - r^2) / sqrt(v1 - (v2 - r^2)^2))`, an
/// antiderivative of `r / sqrt(v1 - (v2 - r^2)^2)`.
pub fn omega1(ctx: &GeometryContext, r: f64, phi: f64) -> f64 {
    let (rmin, rmax) = (ctx.r_min(phi), ctx.r_max(phi));
    let r = r.clamp(rmin, rmax);
    let y = ctx.v2() - r * r;
    let radicand = ((r - rmin) * (r + rmin) * (rmax - r) * (rmax + r)).max(0.0);
    -0.5 * y.atan2(radicand.sqrt())
}

/// `(m w r^alpha / (s + m w r^alpha))^m`: the fading-averaged factor
/// `E[exp(-s P_t G_n h l(r))]` of one interferer at distance `r_km`.
fn interferer_factor(cfg: &NetworkConfig, s: f64, r_km: f64) -> f64 {
    let m = cfg.m as f64;
    let mean = s * cfg.mean_rx_power(cfg.g_interferer, r_km);
    (m / (m + mean)).powi(cfg.m as i32)
}

/// `1 - interferer_factor`, written to keep digits when `s` is small.
fn interferer_deficit(cfg: &NetworkConfig, s: f64, r_km: f64) -> f64 {
    let m = cfg.m as f64;
    let x = s * cfg.mean_rx_power(cfg.g_interferer, r_km) / m;
    -(-(m) * x.ln_1p()).exp_m1()
}

/// `Omega_2(s, r0) = integral_{r0}^{r_vis_max} interferer_factor(r) r dr / sqrt(...)`.
pub fn omega2(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    s: f64,
    r0: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let i = arc_integral(ctx, phi, r0, ctx.r_vis_max(), |r| interferer_factor(cfg, s, r), spec)?;
    // r dr / sqrt(...) = (pi / 2) dpsi
    Ok(Integral {
        value: FRAC_PI_2 * i.value,
        error: FRAC_PI_2 * i.error,
        evaluations: i.evaluations,
    })
}

/// Ingredients of the binomial interference Laplace transform at `(s, r0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BppInterference {
    /// Probability that each of the other `N - 1` satellites interferes.
    pub p_int: f64,
    /// Fading- and distance-averaged `E[exp(-s I_n)]` of one interferer.
    pub j: f64,
    /// `p_int * (1 - j)`, computed without cancellation.
    pub loss: f64,
    pub others: usize,
    pub error: f64,
}

impl BppInterference {
    /// `(1 - p_int + p_int J)^{N-1}`.
    pub fn collapsed(&self) -> f64 {
        (self.others as f64 * (-self.loss).ln_1p()).exp()
    }

    /// `sum_k C(N-1, k) p_int^k (1 - p_int)^{N-1-k} J^k`, term by term.
    pub fn binomial_sum(&self) -> f64 {
        let n = self.others as u64;
        (0..=n)
            .map(|k| {
                binomial(n, k)
                    * self.p_int.powi(k as i32)
                    * (1.0 - self.p_int).powi((n - k) as i32)
                    * self.j.powi(k as i32)
            })
            .sum()
    }
}

fn bpp_interference_at(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    psi0: f64,
    psi_vis: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<BppInterference> {
    let others = cfg.n_sats - 1;
    let span = psi_vis - psi0;
    if span <= 0.0 || s == 0.0 {
        return Ok(BppInterference {
            p_int: (span.max(0.0)) / (1.0 - psi0),
            j: 1.0,
            loss: 0.0,
            others,
            error: 0.0,
        });
    }
    let deficit = integrate_arc(ctx, phi, psi0, psi_vis, spec, |r, _| Ok(interferer_deficit(cfg, s, r)))?;
    Ok(BppInterference {
        p_int: span / (1.0 - psi0),
        j: 1.0 - deficit.value / span,
        loss: deficit.value / (1.0 - psi0),
        others,
        error: others as f64 * deficit.error / (1.0 - psi0),
    })
}

/// Components of the binomial interference Laplace transform.
pub fn bpp_interference(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    r0: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<BppInterference> {
    check_laplace_args(ctx, phi, r0, s)?;
    let psi_vis = ctx.p_vis(phi)?;
    let psi0 = serving_psi(ctx, phi, r0, psi_vis);
    bpp_interference_at(cfg, ctx, phi, psi0, psi_vis, s, spec)
}

/// `E[exp(-s I) | R0 = r0]` for binomially placed satellites.
///
/// The interferer count is `Bin(N - 1, p_int)` and each interferer's distance
/// and fading are i.i.d., so the binomial mixture collapses to
/// `(1 - p_int + p_int J)^{N-1}`.
pub fn laplace_interference_bpp(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    r0: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(bpp_interference(cfg, ctx, phi, r0, s, spec)?.collapsed())
}

fn ppp_exponent_at(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    psi0: f64,
    psi_vis: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    if psi_vis <= psi0 || s == 0.0 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    // (2N/pi) (Omega_1(r_vis) - Omega_1(r0) - Omega_2) = N * integral (1 - factor) dpsi
    let n = cfg.n_sats as f64;
    let d = integrate_arc(ctx, phi, psi0, psi_vis, spec, |r, _| Ok(interferer_deficit(cfg, s, r)))?;
    Ok(Integral {
        value: n * d.value,
        error: n * d.error,
        evaluations: d.evaluations,
    })
}

/// `E[exp(-s I) | R0 = r0]` when the satellites form a Poisson process of
/// the same mean count, `exp(-(2N/pi)(Omega_1(r_vis) - Omega_1(r0) - Omega_2(s, r0)))`.
pub fn laplace_interference_ppp(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    r0: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_laplace_args(ctx, phi, r0, s)?;
    let psi_vis = ctx.p_vis(phi)?;
    let psi0 = serving_psi(ctx, phi, r0, psi_vis);
    Ok((-ppp_exponent_at(cfg, ctx, phi, psi0, psi_vis, s, spec)?.value).exp())
}

fn serving_psi(ctx: &GeometryContext, phi: f64, r0: f64, psi_vis: f64) -> f64 {
    if r0 >= ctx.r_vis_max() {
        psi_vis
    } else {
        ctx.psi_unchecked(r0, phi).min(psi_vis)
    }
}

fn check_laplace_args(ctx: &GeometryContext, phi: f64, r0: f64, s: f64) -> Result<()> {
    check_latitude(phi)?;
    if !ctx.sees_orbit(phi) {
        return Err(Error::domain("no visible arc at this latitude"));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::domain(format!("Laplace argument must be >= 0, got {s}")));
    }
    check_within(r0, ctx.r_min(phi), ctx.r_vis_max(), "serving distance")
}

fn check_coverage_args(cfg: &NetworkConfig, phi: f64, tau: f64) -> Result<()> {
    cfg.validate()?;
    check_latitude(phi)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {tau}")));
    }
    Ok(())
}

/// `1 / (P_t G_0 l(r))`, so that the serving link is covered iff
/// `h_0 >= tau * (I + N0 W) * inverse_rx(r)`.
fn inverse_serving_rx(cfg: &NetworkConfig, r_km: f64) -> f64 {
    1.0 / cfg.mean_rx_power(cfg.g_serving, r_km)
}

fn finish(cfg: &NetworkConfig, tau: f64, method: Method, value: f64, error: f64) -> Result<CoverageResult> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        return Err(Error::Numeric(format!(
            "coverage {value} outside [0, 1] (method {})",
            method.label()
        )));
    }
    Ok(CoverageResult {
        threshold_db: linear_to_db(tau),
        probability: value.clamp(0.0, 1.0),
        method,
        error_estimate: error,
        config_digest: cfg.digest(),
        no_visible_arc: false,
    })
}

/// Coverage probability for binomially placed satellites under Nakagami-m
/// fading. Exact for `m = 1`; for `m >= 2` the serving gain's CDF is replaced
/// by its `1 - sum_i C(m,i)(-1)^{i+1} e^{-nu i x}` approximation.
pub fn coverage_bpp(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    tau: f64,
    quad: &QuadratureSpec,
) -> Result<CoverageResult> {
    check_coverage_args(cfg, phi, tau)?;
    if !ctx.sees_orbit(phi) {
        return Ok(CoverageResult::invisible(cfg, tau, Method::BppAnalytic));
    }
    let psi_vis = ctx.p_vis(phi)?;
    let n = cfg.n_sats as f64;
    let nu = cfg.fading().nu();
    let noise = cfg.noise_power();
    let inner = quad.tightened(INNER_TIGHTENING);

    // The visibility prefactor 1 - (1 - p_vis)^N cancels the normalisation of
    // the serving-distance density, leaving the nearest-distance density
    // N (1 - psi)^{N-1} dpsi on [0, psi_vis].
    let mut total = 0.0;
    let mut error = 0.0;
    for i in 1..=cfg.m {
        let weight = alternating_binomial(cfg.m, i);
        let term = integrate_arc(ctx, phi, 0.0, psi_vis, quad, |r, psi| {
            let s = nu * i as f64 * tau * inverse_serving_rx(cfg, r);
            let li = bpp_interference_at(cfg, ctx, phi, psi, psi_vis, s, &inner)?;
            Ok((-s * noise).exp() * li.collapsed() * n * (1.0 - psi).powf(n - 1.0))
        })?;
        total += weight * term.value;
        error += weight.abs() * term.error;
    }
    finish(cfg, tau, Method::BppAnalytic, total, error)
}

/// Coverage probability under Rayleigh fading (`m = 1`), coded directly
/// from the single-term expression; the configured `m` is ignored.
pub fn coverage_rayleigh(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    tau: f64,
    quad: &QuadratureSpec,
) -> Result<CoverageResult> {
    check_coverage_args(cfg, phi, tau)?;
    if !ctx.sees_orbit(phi) {
        return Ok(CoverageResult::invisible(cfg, tau, Method::BppAnalytic));
    }
    let psi_vis = ctx.p_vis(phi)?;
    let n = cfg.n_sats as f64;
    let others = (cfg.n_sats - 1) as f64;
    let noise = cfg.noise_power();
    let inner = quad.tightened(INNER_TIGHTENING);
    let serving_law = crate::distance::DistanceLaw::serving_bpp(*ctx, phi, cfg.n_sats)?;
    let visible = -(n * (-psi_vis).ln_1p()).exp_m1();

    let outer = integrate_arc(ctx, phi, 0.0, psi_vis, quad, |r0, psi0| {
        let s = tau / (cfg.tx_power_w * cfg.g_serving * cfg.path_loss_unchecked(r0));
        // J: mean of u_n r^a / (s + u_n r^a) over the interferer distance law
        let lost = if psi_vis > psi0 {
            integrate_arc(ctx, phi, psi0, psi_vis, &inner, |r, _| {
                let x = s * cfg.tx_power_w * cfg.g_interferer * cfg.path_loss_unchecked(r);
                Ok(x / (1.0 + x))
            })?
            .value
        } else {
            0.0
        };
        let laplace = (1.0 - lost / (1.0 - psi0)).powf(others);
        Ok((-s * noise).exp() * laplace * serving_law.density_of_psi(psi0))
    })?;
    finish(
        cfg,
        tau,
        Method::BppAnalytic,
        visible * outer.value,
        visible * outer.error,
    )
}

/// Coverage probability in the Poisson limit of the constellation.
///
/// Returns the unconditional probability: the Poisson visibility probability
/// `1 - e^{-N psi(r_vis_max)}` multiplies the serving-distance density, whose
/// normalisation it cancels, leaving `(2N/pi) sum_i C(m,i)(-1)^{i+1} Xi_i`.
pub fn coverage_ppp(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    phi: f64,
    tau: f64,
    quad: &QuadratureSpec,
) -> Result<CoverageResult> {
    check_coverage_args(cfg, phi, tau)?;
    if !ctx.sees_orbit(phi) {
        return Ok(CoverageResult::invisible(cfg, tau, Method::PppAnalytic));
    }
    let psi_vis = ctx.p_vis(phi)?;
    let n = cfg.n_sats as f64;
    let nu = cfg.fading().nu();
    let noise = cfg.noise_power();
    let inner = quad.tightened(INNER_TIGHTENING);

    let mut total = 0.0;
    let mut error = 0.0;
    for i in 1..=cfg.m {
        let weight = alternating_binomial(cfg.m, i);
        // Xi_i with r dr / sqrt(...) = (pi/2) dpsi, times 2N/pi
        let term = integrate_arc(ctx, phi, 0.0, psi_vis, quad, |r, psi| {
            let s = nu * i as f64 * tau * inverse_serving_rx(cfg, r);
            let interference = ppp_exponent_at(cfg, ctx, phi, psi, psi_vis, s, &inner)?.value;
            let theta = n * psi + s * noise + interference;
            Ok(n * (-theta).exp())
        })?;
        total += weight * term.value;
        error += weight.abs() * term.error;
    }
    finish(cfg, tau, Method::PppAnalytic, total, error)
}

/// Probability that at least one satellite is visible in the Poisson limit.
pub fn visible_probability_ppp(ctx: &GeometryContext, phi: f64, n_sats: usize) -> Result<f64> {
    Ok(-(-(n_sats as f64) * ctx.p_vis(phi)?).exp_m1())
}

/// Integral of a polynomial in `psi` over `[psi_lo, psi_hi]`, in closed form.
/// Used to check the substitution.
pub fn polynomial_psi_integral(coeffs: &[f64], psi_lo: f64, psi_hi: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let p = (k + 1) as f64;
            c * (psi_hi.powf(p) - psi_lo.powf(p)) / p
        })
        .sum()
}

/// Convenience wrapper integrating the kernel alone, used by normalisation
/// checks.
pub fn kernel_mass(ctx: &GeometryContext, phi: f64, r_lo: f64, r_hi: f64) -> Result<f64> {
    Ok(arc_integral(ctx, phi, r_lo, r_hi, |_| 1.0, &QuadratureSpec::default())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use crate::distance::DistanceLaw;

    fn ctx() -> GeometryContext {
        GeometryContext::geostationary()
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kernel_masses() {
        let c = ctx();
        for deg in [0.0, 30.0, 60.0, 80.0] {
            let phi = f64::to_radians(deg);
            let full = kernel_mass(&c, phi, c.r_min(phi), c.r_max(phi)).unwrap();
            assert!((full - 1.0).abs() < 1e-12, "{deg}: {full}");
            let vis = kernel_mass(&c, phi, c.r_min(phi), c.r_vis_max()).unwrap();
            assert!((vis - c.p_vis(phi).unwrap()).abs() < 1e-12);
        }
    }

    /// Trapezoid rule on a fine grid in u, independent of the adaptive
    /// quadrature.
    fn trapezoid_density_mass(law: &DistanceLaw, ctx: &GeometryContext, points: usize) -> f64 {
        let (plo, phi_) = law.psi_support();
        let h = (phi_ - plo) / points as f64;
        let f = |psi: f64| law.density_of_psi(psi);
        let mut s = 0.5 * (f(plo) + f(phi_));
        for k in 1..points {
            s += f(plo + k as f64 * h);
        }
        let _ = ctx;
        s * h
    }

    #[test]
    fn densities_normalise() {
        let c = ctx();
        let phi = 30f64.to_radians();
        let r0 = DistanceLaw::serving_bpp(c, phi, 10).unwrap().quantile(0.5).unwrap();
        let laws = [
            DistanceLaw::nearest_bpp(c, phi, 10).unwrap(),
            DistanceLaw::serving_bpp(c, phi, 10).unwrap(),
            DistanceLaw::interferer_given_r0(c, phi, 10, r0).unwrap(),
            DistanceLaw::serving_ppp(c, phi, 10).unwrap(),
        ];
        for law in laws {
            let (lo, hi) = law.support();
            let quad = arc_integral(&c, phi, lo, hi, |r| law.density_of_psi(c.psi_unchecked(r, phi)), &q())
                .unwrap()
                .value;
            assert!((quad - 1.0).abs() < 1e-8, "{:?}: {quad}", law.kind());
            let trap = trapezoid_density_mass(&law, &c, 1_000_000);
            assert!((trap - 1.0).abs() < 1e-8, "{:?}: {trap}", law.kind());
        }
    }

    #[test]
    fn polynomial_in_psi_matches_closed_form() {
        let c = ctx();
        let phi = 0.6;
        let coeffs = [0.3, -1.2, 4.0, 2.5, -0.7];
        let (lo, hi) = (c.r_min(phi) + 500.0, c.r_vis_max());
        let got = arc_integral(
            &c,
            phi,
            lo,
            hi,
            |r| {
                let p = c.psi_unchecked(r, phi);
                coeffs.iter().rev().fold(0.0, |acc, k| acc * p + k)
            },
            &q(),
        )
        .unwrap()
        .value;
        let exact = polynomial_psi_integral(&coeffs, c.psi_unchecked(lo, phi), c.psi_unchecked(hi, phi));
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
    }

    #[test]
    fn arc_integral_rejects_bad_bounds() {
        let c = ctx();
        let phi = 0.2;
        assert!(arc_integral(&c, phi, c.r_min(phi) - 5.0, c.r_max(phi), |_| 1.0, &q()).is_err());
        assert!(arc_integral(&c, phi, c.r_max(phi), c.r_min(phi), |_| 1.0, &q()).is_err());
    }

    #[test]
    fn omega1_is_antiderivative() {
        let c = ctx();
        let phi = 37f64.to_radians();
        assert!((omega1(&c, c.r_min(phi), phi) + PI / 4.0).abs() < 1e-15);
        assert!((omega1(&c, c.r_max(phi), phi) - PI / 4.0).abs() < 1e-15);
        for r0 in [c.r_min(phi), 37_500.0, 40_000.0] {
            let diff = omega1(&c, c.r_vis_max(), phi) - omega1(&c, r0, phi);
            let psi_span = c.p_vis(phi).unwrap() - c.psi(r0, phi).unwrap();
            assert!((diff - FRAC_PI_2 * psi_span).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_form_of_ppp_exponent() {
        let c = ctx();
        let phi = 37f64.to_radians();
        let cfg = NetworkConfig::reference(50, 20.0).with_m(2);
        let r0 = 38_000.0;
        let s = 3.0 * inverse_serving_rx(&cfg, r0);
        let o2 = omega2(&cfg, &c, phi, s, r0, &q()).unwrap().value;
        let o1 = omega1(&c, c.r_vis_max(), phi) - omega1(&c, r0, phi);
        let via_omega = (-(2.0 * 50.0 / PI) * (o1 - o2)).exp();
        let direct = laplace_interference_ppp(&cfg, &c, phi, r0, s, &q()).unwrap();
        assert!((via_omega - direct).abs() < 1e-10, "{via_omega} vs {direct}");
    }

    #[test]
    fn laplace_edge_values() {
        let c = ctx();
        let phi = 30f64.to_radians();
        let cfg = NetworkConfig::reference(10, 20.0);
        let r0 = 37_000.0;
        assert_eq!(laplace_interference_bpp(&cfg, &c, phi, r0, 0.0, &q()).unwrap(), 1.0);
        assert_eq!(laplace_interference_ppp(&cfg, &c, phi, r0, 0.0, &q()).unwrap(), 1.0);
        let s = 1e3 * inverse_serving_rx(&cfg, r0);
        let rv = c.r_vis_max();
        assert_eq!(laplace_interference_bpp(&cfg, &c, phi, rv, s, &q()).unwrap(), 1.0);
        assert_eq!(laplace_interference_ppp(&cfg, &c, phi, rv, s, &q()).unwrap(), 1.0);
        assert!(laplace_interference_bpp(&cfg, &c, phi, r0, -1.0, &q()).is_err());
        assert!(laplace_interference_bpp(&cfg, &c, 1.5, r0, s, &q()).is_err());
    }

    #[test]
    fn laplace_monotone_in_s() {
        let c = ctx();
        let phi = 30f64.to_radians();
        for m in [1, 2, 3] {
            let cfg = NetworkConfig::reference(30, 20.0).with_m(m);
            let r0 = 37_500.0;
            let base = inverse_serving_rx(&cfg, r0);
            let mut prev_b = 1.0;
            let mut prev_p = 1.0;
            for k in 0..40 {
                let s = base * db_to_linear(-20.0 + k as f64);
                let b = laplace_interference_bpp(&cfg, &c, phi, r0, s, &q()).unwrap();
                let p = laplace_interference_ppp(&cfg, &c, phi, r0, s, &q()).unwrap();
                assert!(b > 0.0 && b <= prev_b + 1e-15);
                assert!(p > 0.0 && p <= prev_p + 1e-15);
                prev_b = b;
                prev_p = p;
            }
        }
    }

    #[test]
    fn collapse_equals_binomial_sum() {
        let c = ctx();
        let phi = 30f64.to_radians();
        for n in 1..=30 {
            let cfg = NetworkConfig::reference(n, 20.0).with_m(2);
            let r0 = 36_800.0;
            let s = 2.0 * inverse_serving_rx(&cfg, r0);
            let parts = bpp_interference(&cfg, &c, phi, r0, s, &q()).unwrap();
            assert!((parts.collapsed() - parts.binomial_sum()).abs() < 1e-12, "n={n}");
            let weights: f64 = (0..=parts.others as u64)
                .map(|k| {
                    binomial(parts.others as u64, k)
                        * parts.p_int.powi(k as i32)
                        * (1.0 - parts.p_int).powi((parts.others as u64 - k) as i32)
                })
                .sum();
            assert!((weights - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ppp_laplace_tracks_bpp_for_many_satellites() {
        let c = ctx();
        let phi = 37f64.to_radians();
        let cfg = NetworkConfig::reference(391, 20.0).with_m(2);
        let r0 = DistanceLaw::serving_bpp(c, phi, 391).unwrap().quantile(0.5).unwrap();
        let base = inverse_serving_rx(&cfg, r0);
        for k in 0..=30 {
            let s = base * db_to_linear(-10.0 + k as f64);
            let b = laplace_interference_bpp(&cfg, &c, phi, r0, s, &q()).unwrap();
            let p = laplace_interference_ppp(&cfg, &c, phi, r0, s, &q()).unwrap();
            assert!((b - p).abs() < 1e-3, "s index {k}: {b} vs {p}");
        }
    }

    #[test]
    fn rayleigh_matches_general_form() {
        let c = ctx();
        let phi = 37f64.to_radians();
        let cfg = NetworkConfig::reference(100, 20.0);
        for tau_db in [-10.0, 0.0, 7.0, 20.0] {
            let tau = db_to_linear(tau_db);
            let a = coverage_bpp(&cfg, &c, phi, tau, &q()).unwrap().probability;
            let b = coverage_rayleigh(&cfg, &c, phi, tau, &q()).unwrap().probability;
            assert!((a - b).abs() < 1e-12, "{tau_db}: {a} vs {b}");
        }
    }

    #[test]
    fn coverage_vanishes_without_visible_arc() {
        let c = ctx();
        let cfg = NetworkConfig::reference(100, 20.0).with_m(2);
        let phi = 82f64.to_radians();
        for f in [coverage_bpp, coverage_rayleigh, coverage_ppp] {
            let r = f(&cfg, &c, phi, 1.0, &q()).unwrap();
            assert_eq!(r.probability, 0.0);
            assert!(r.no_visible_arc);
        }
    }

    #[test]
    fn low_threshold_limit_is_visibility() {
        let c = ctx();
        let phi = 37f64.to_radians();
        for n in [1, 3, 10] {
            let cfg = NetworkConfig::reference(n, 20.0);
            let cov = coverage_rayleigh(&cfg, &c, phi, 1e-9, &q()).unwrap().probability;
            let vis = 1.0 - c.case_probabilities(phi, n).unwrap().none;
            assert!((cov - vis).abs() < 1e-6, "n={n}: {cov} vs {vis}");
        }
    }

    #[test]
    fn coverage_non_increasing_in_threshold() {
        let c = ctx();
        let phi = 37f64.to_radians();
        let cfg = NetworkConfig::reference(100, 20.0);
        let vis = 1.0 - c.case_probabilities(phi, 100).unwrap().none;
        let mut prev = f64::INFINITY;
        for k in 0..61 {
            let tau = db_to_linear(-10.0 + 0.5 * k as f64);
            let p = coverage_rayleigh(&cfg, &c, phi, tau, &q()).unwrap().probability;
            assert!(p <= prev + 1e-12);
            assert!(p <= vis + 1e-12 && p >= 0.0);
            prev = p;
        }
    }

    #[test]
    fn invalid_threshold() {
        let c = ctx();
        let cfg = NetworkConfig::reference(10, 20.0);
        assert!(coverage_bpp(&cfg, &c, 0.3, 0.0, &q()).is_err());
        assert!(coverage_ppp(&cfg, &c, 0.3, -1.0, &q()).is_err());
    }
}
