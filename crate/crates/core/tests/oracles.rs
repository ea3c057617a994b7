//! Checks against independent references: statrs gamma laws, closed forms
//! and model invariants.

use geocov::analysis::{arc_integral, coverage_bpp, coverage_ppp, laplace_interference_bpp};
use geocov::channel::{db_to_linear, Nakagami, NetworkConfig};
use geocov::distance::DistanceLaw;
use geocov::quadrature::QuadratureSpec;
use geocov::stats::EmpiricalCdf;
use geocov::GeometryContext;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Gamma};

fn gamma(m: u32) -> Gamma {
    Gamma::new(f64::from(m), f64::from(m)).unwrap()
}

#[test]
fn nakagami_cdf_matches_gamma() {
    for m in 1..=6 {
        let fading = Nakagami::new(m).unwrap();
        let reference = gamma(m);
        for k in 0..=400 {
            let x = f64::from(k) * 0.02;
            let exact = reference.cdf(x);
            assert!((fading.cdf(x).unwrap() - exact).abs() < 1e-12, "m={m} x={x}");
            // the exponential-sum form bounds the gamma law from below
            assert!(fading.cdf_approx(x).unwrap() <= exact + 1e-12, "m={m} x={x}");
        }
    }
}

#[test]
fn nakagami_sampler_matches_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [1, 2, 4] {
        let fading = Nakagami::new(m).unwrap();
        let draws: Vec<f64> = (0..20_000).map(|_| fading.sample(&mut rng)).collect();
        let reference = gamma(m);
        let ks = EmpiricalCdf::new(draws).ks_against(|x| reference.cdf(x));
        assert!(ks < 0.015, "m={m} ks={ks}");
    }
}

/// Coverage with a single satellite and no interference, integrated directly
/// from the gamma survival function.
fn noise_limited(cfg: &NetworkConfig, ctx: &GeometryContext, phi: f64, tau: f64) -> f64 {
    let reference = gamma(cfg.m);
    let noise = cfg.noise_power();
    arc_integral(
        ctx,
        phi,
        ctx.r_min(phi),
        ctx.r_vis_max(),
        |r| reference.sf(tau * noise / cfg.mean_rx_power(cfg.g_serving, r)),
        &QuadratureSpec::default(),
    )
    .unwrap()
    .value
}

#[test]
fn single_satellite_coverage_matches_direct_integral() {
    let ctx = GeometryContext::geostationary();
    let quad = QuadratureSpec::default();
    // a weak link so that noise matters over the whole threshold range
    let mut cfg = NetworkConfig::reference(1, 20.0);
    cfg.tx_power_w *= 1e-4;
    for lat in [0.0, 40.0, 75.0] {
        let phi = f64::to_radians(lat);
        for tau_db in [-10.0, 0.0, 5.0, 10.0] {
            let tau = db_to_linear(tau_db);
            let rayleigh = coverage_bpp(&cfg, &ctx, phi, tau, &quad).unwrap().probability;
            let direct = noise_limited(&cfg, &ctx, phi, tau);
            assert!((rayleigh - direct).abs() < 1e-8, "m=1 lat={lat} tau={tau_db}");

            let cfg2 = cfg.clone().with_m(2);
            let bound = coverage_bpp(&cfg2, &ctx, phi, tau, &quad).unwrap().probability;
            let direct2 = noise_limited(&cfg2, &ctx, phi, tau);
            assert!(
                bound >= direct2 - 1e-8 && bound - direct2 < 0.05,
                "m=2 lat={lat} tau={tau_db}"
            );
        }
    }
}

#[test]
fn single_satellite_without_noise_covers_when_visible() {
    let ctx = GeometryContext::geostationary();
    let mut cfg = NetworkConfig::reference(1, 20.0);
    cfg.noise_density = 0.0;
    for lat in [0.0, 50.0, 80.0] {
        let phi = f64::to_radians(lat);
        let c = coverage_bpp(&cfg, &ctx, phi, 10.0, &QuadratureSpec::default()).unwrap();
        assert!((c.probability - ctx.p_vis(phi).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn serving_distance_quantiles_invert_cdf() {
    let ctx = GeometryContext::geostationary();
    for lat in [0.0, 45.0, 80.0] {
        let phi = f64::to_radians(lat);
        for n in [1, 7, 100] {
            let law = DistanceLaw::serving_bpp(ctx, phi, n).unwrap();
            for k in 1..20 {
                let u = f64::from(k) / 20.0;
                let r = law.quantile(u).unwrap();
                assert!((law.cdf(r).unwrap() - u).abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coverage_is_a_decreasing_probability(
        lat in 0.0f64..80.0,
        n in 1usize..300,
        m in 1u32..4,
        tau_db in -15.0f64..25.0,
    ) {
        let ctx = GeometryContext::geostationary();
        let quad = QuadratureSpec::default();
        let phi = lat.to_radians();
        let cfg = NetworkConfig::reference(n, 20.0).with_m(m);
        let lo = coverage_bpp(&cfg, &ctx, phi, db_to_linear(tau_db), &quad).unwrap().probability;
        let hi = coverage_bpp(&cfg, &ctx, phi, db_to_linear(tau_db + 1.0), &quad).unwrap().probability;
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi <= lo + 1e-9);
        let ppp = coverage_ppp(&cfg, &ctx, phi, db_to_linear(tau_db), &quad).unwrap().probability;
        prop_assert!((0.0..=1.0).contains(&ppp));
        // never better than seeing at least one satellite
        prop_assert!(lo <= 1.0 - ctx.case_probabilities(phi, n).unwrap().none + 1e-9);
    }

    #[test]
    fn interference_laplace_is_monotone(
        lat in 0.0f64..80.0,
        n in 2usize..200,
        u in 0.05f64..0.95,
        s1 in 0.01f64..10.0,
        ds in 0.01f64..10.0,
    ) {
        let ctx = GeometryContext::geostationary();
        let quad = QuadratureSpec::default();
        let phi = lat.to_radians();
        let cfg = NetworkConfig::reference(n, 20.0);
        let r0 = DistanceLaw::serving_bpp(ctx, phi, n).unwrap().quantile(u).unwrap();
        let unit = 1.0 / cfg.mean_rx_power(cfg.g_interferer, ctx.r_vis_max());
        let a = laplace_interference_bpp(&cfg, &ctx, phi, r0, s1 * unit, &quad).unwrap();
        let b = laplace_interference_bpp(&cfg, &ctx, phi, r0, (s1 + ds) * unit, &quad).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-12);
    }
}
