//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
//!
//! The seed is fixed once here and never adjusted to make a check pass.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use geocov::analysis::laplace_interference_bpp;
use geocov::analysis::{arc_integral, bpp_interference, coverage_bpp, coverage_ppp, polynomial_psi_integral};
use geocov::channel::{db_to_linear, pt_from_eirp_density, watts_to_dbm, NetworkConfig};
use geocov::distance::{DistanceKind, DistanceLaw};
use geocov::montecarlo::{
    case_frequencies, estimate_many, laplace_interference_mc, sample_distances, sample_interferers_conditioned, McSpec,
};
use geocov::quadrature::QuadratureSpec;
use geocov::stats::EmpiricalCdf;
use geocov::tle::{average_visible_count, parse_tle, GeoSnapshot, DEFAULT_MAX_INCLINATION_DEG};
use geocov::{GeometryContext, TerminalPosition};

const SEED: u64 = 20_231_021;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = fn() -> geocov::Result<Outcome>;

fn ctx() -> GeometryContext {
    GeometryContext::geostationary()
}

fn terminal(lat_deg: f64) -> TerminalPosition {
    TerminalPosition::from_degrees(&ctx(), lat_deg, 137.0).expect("valid terminal")
}

fn taus_db() -> Vec<f64> {
    (-10..=20).map(f64::from).collect()
}

fn c1_constants() -> geocov::Result<Outcome> {
    let g = ctx();
    let phi_inv = g.invisibility_latitude().to_degrees();
    let arc = g.visible_arc_length(0.0)?;
    let rv = g.r_vis_max();
    let pt = watts_to_dbm(pt_from_eirp_density(59.0, 51.0, 30e6));
    let pass = (phi_inv - 81.3).abs() <= 0.05
        && (arc - 119_657.0).abs() <= 1.0
        && (rv - 41_679.0).abs() <= 1.0
        && (pt - 52.77).abs() <= 0.01;
    Ok(check(
        pass,
        format!("phi_inv {phi_inv:.4} deg, arc {arc:.1} km, r_vis_max {rv:.1} km, Pt {pt:.4} dBm"),
    ))
}

fn c2_distance_laws() -> geocov::Result<Outcome> {
    let g = ctx();
    let mut worst = (0.0f64, String::new());
    for lat in [0.0, 30.0, 60.0] {
        let phi = f64::to_radians(lat);
        let t = terminal(lat);
        for n in [10, 100] {
            let spec = McSpec::new(100_000, SEED);
            let draws = sample_distances(&g, &t, n, &spec)?;
            let nearest = DistanceLaw::nearest_bpp(g, phi, n)?;
            let serving = DistanceLaw::serving_bpp(g, phi, n)?;
            let r0 = serving.quantile(0.5)?;
            let interferer = DistanceLaw::interferer_given_r0(g, phi, n, r0)?;
            let band = (serving.quantile(0.495)?, serving.quantile(0.505)?);
            let inter = sample_interferers_conditioned(&g, &t, n, band, 100_000, &McSpec::new(100_000_000, SEED))?;
            for (name, law, sample) in [
                ("R", nearest, draws.nearest),
                ("R0", serving, draws.serving),
                ("Rn|r0", interferer, inter),
            ] {
                let ks = EmpiricalCdf::new(sample).ks_against(|r| law.cdf(r).unwrap_or(f64::NAN));
                if ks > worst.0 {
                    worst = (ks, format!("{name} at {lat} deg, N={n}"));
                }
            }
        }
    }
    Ok(check(
        worst.0 < 0.01,
        format!("largest KS {:.5} ({})", worst.0, worst.1),
    ))
}

fn c3_case_probabilities() -> geocov::Result<Outcome> {
    let g = ctx();
    let trials = 1_000_000u64;
    let mut worst = (0.0f64, String::new());
    let mut pass = true;
    for n in [2usize, 10, 100] {
        for lat in (0..=90).step_by(10) {
            let phi = f64::from(lat).to_radians();
            let p = g.case_probabilities(phi, n)?;
            let counts = case_frequencies(&g, &terminal(f64::from(lat)), n, &McSpec::new(trials, SEED))?;
            for (k, expected) in [p.none, p.one, p.many].into_iter().enumerate() {
                let freq = counts[k] as f64 / trials as f64;
                let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
                let z = if sigma > 0.0 {
                    (freq - expected).abs() / sigma
                } else if freq == expected {
                    0.0
                } else {
                    f64::INFINITY
                };
                pass &= z <= 3.0;
                if z > worst.0 {
                    worst = (z, format!("case {} at {lat} deg, N={n}", k + 1));
                }
            }
        }
    }
    Ok(check(
        pass,
        format!("largest deviation {:.2} sigma ({})", worst.0, worst.1),
    ))
}

fn c4_laplace() -> geocov::Result<Outcome> {
    let g = ctx();
    let lat = 30.0;
    let phi = f64::to_radians(lat);
    let quad = QuadratureSpec::default();
    let t = terminal(lat);
    let mut worst = (0.0f64, String::new());
    let mut pass = true;
    for m in [1, 2] {
        let cfg = NetworkConfig::reference(10, 20.0).with_m(m);
        let serving = DistanceLaw::serving_bpp(g, phi, 10)?;
        let r0 = serving.quantile(0.5)?;
        let band = (serving.quantile(0.495)?, serving.quantile(0.505)?);
        let unit = 1.0 / cfg.mean_rx_power(cfg.g_interferer, g.r_vis_max());
        let s: Vec<f64> = (0..10).map(|k| unit * 10f64.powf(-1.5 + 0.4 * f64::from(k))).collect();
        let mc = laplace_interference_mc(&cfg, &g, &t, band, &s, 100_000, &McSpec::new(100_000_000, SEED))?;
        for (&s, (mean, se)) in s.iter().zip(mc) {
            let a = laplace_interference_bpp(&cfg, &g, phi, r0, s, &quad)?;
            let z = (a - mean).abs() / se;
            pass &= z <= 3.0;
            if z > worst.0 {
                worst = (z, format!("m={m}, s*P={:.3}", s / unit));
            }
        }
    }
    let mut collapse = 0.0f64;
    for n in 1..=30 {
        for m in [1, 2, 3] {
            let cfg = NetworkConfig::reference(n, 20.0).with_m(m);
            for r0 in [36_900.0, 38_000.0, 40_000.0] {
                let s = 3.0 / cfg.mean_rx_power(cfg.g_serving, r0);
                let parts = bpp_interference(&cfg, &g, phi, r0, s, &quad)?;
                collapse = collapse.max((parts.collapsed() - parts.binomial_sum()).abs());
            }
        }
    }
    pass &= collapse <= 1e-12;
    Ok(check(
        pass,
        format!(
            "largest MC deviation {:.2} sigma ({}); collapsed vs binomial sum {collapse:.2e}",
            worst.0, worst.1
        ),
    ))
}

fn c5_coverage() -> geocov::Result<Outcome> {
    let g = ctx();
    let lat = 37.0;
    let phi = f64::to_radians(lat);
    let quad = QuadratureSpec::default();
    let t = terminal(lat);
    let taus: Vec<f64> = taus_db().iter().map(|&x| db_to_linear(x)).collect();
    let mut pass = true;
    let mut notes = Vec::new();
    for (m, tol) in [(1u32, 0.01), (2, 0.03)] {
        for alpha in [3.0, 3.7] {
            let cfg = NetworkConfig::reference(100, 20.0).with_m(m).with_alpha(alpha);
            let mc = estimate_many(&cfg, &g, &t, &taus, &McSpec::new(100_000, SEED))?;
            let mut worst = 0.0f64;
            for (&tau, est) in taus.iter().zip(&mc) {
                let a = coverage_bpp(&cfg, &g, phi, tau, &quad)?.probability;
                worst = worst.max((a - est.result.probability).abs());
            }
            pass &= worst <= tol;
            notes.push(format!("m={m} alpha={alpha}: {worst:.4}"));
        }
    }
    Ok(check(pass, format!("largest |analytic - MC|: {}", notes.join(", "))))
}

fn sup_gap(n: usize) -> geocov::Result<f64> {
    let g = ctx();
    let phi = f64::to_radians(37.0);
    let quad = QuadratureSpec::default();
    let cfg = NetworkConfig::reference(n, 30.0).with_m(2);
    let mut worst = 0.0f64;
    for t in taus_db() {
        let tau = db_to_linear(t);
        let b = coverage_bpp(&cfg, &g, phi, tau, &quad)?.probability;
        let p = coverage_ppp(&cfg, &g, phi, tau, &quad)?.probability;
        worst = worst.max((b - p).abs());
    }
    Ok(worst)
}

fn c6_poisson_limit() -> geocov::Result<Outcome> {
    let gaps = [10, 50, 100, 391]
        .into_iter()
        .map(sup_gap)
        .collect::<geocov::Result<Vec<_>>>()?;
    let monotone = gaps.windows(2).all(|w| w[0] > w[1]);
    Ok(check(
        gaps[3] <= 0.02 && monotone,
        format!(
            "sup gap N=10 {:.4}, N=50 {:.4}, N=100 {:.4}, N=391 {:.4}",
            gaps[0], gaps[1], gaps[2], gaps[3]
        ),
    ))
}

fn c7_shapes() -> geocov::Result<Outcome> {
    let g = ctx();
    let quad = QuadratureSpec::default();
    let phi37 = f64::to_radians(37.0);
    let ns = [5, 10, 15, 20, 25, 30, 40, 50, 75, 100, 150, 200, 300, 400, 600];
    let by_n: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let cfg = NetworkConfig::reference(n, 30.0).with_m(2);
            coverage_bpp(&cfg, &g, phi37, 1.0, &quad).map(|c| c.probability)
        })
        .collect::<geocov::Result<_>>()?;
    let peak = by_n
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let unimodal = peak > 0
        && peak < ns.len() - 1
        && by_n[..=peak].windows(2).all(|w| w[0] <= w[1])
        && by_n[peak..].windows(2).all(|w| w[0] >= w[1]);

    let mut latitude_ok = true;
    let mut lat_note = Vec::new();
    for n in [100, 200] {
        let cfg = NetworkConfig::reference(n, 20.0);
        let at = |lat: f64| coverage_bpp(&cfg, &g, lat.to_radians(), 1.0, &quad).map(|c| c.probability);
        let equator = at(0.0)?;
        let high = [60.0, 65.0, 70.0, 75.0]
            .map(at)
            .into_iter()
            .collect::<geocov::Result<Vec<_>>>()?;
        latitude_ok &= high.iter().all(|&h| h > equator);
        lat_note.push(format!(
            "N={n}: {equator:.4} at 0 vs {:.4}..{:.4} at 60-75",
            high[0], high[3]
        ));
    }

    let mut zero_ok = true;
    for lat in [81.4, 85.0, 90.0] {
        let cfg = NetworkConfig::reference(100, 20.0).with_m(2);
        let phi = f64::to_radians(lat);
        zero_ok &= coverage_bpp(&cfg, &g, phi, 1.0, &quad)?.probability == 0.0;
        zero_ok &= coverage_ppp(&cfg, &g, phi, 1.0, &quad)?.probability == 0.0;
    }
    Ok(check(
        unimodal && latitude_ok && zero_ok,
        format!(
            "N sweep peak at N={} ({:.4}), unimodal {unimodal}; {}; zero beyond phi_inv {zero_ok}",
            ns[peak],
            by_n[peak],
            lat_note.join("; ")
        ),
    ))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_geo_2023-10-21.tle")
}

fn c8_tle() -> geocov::Result<Outcome> {
    let text = std::fs::read_to_string(fixture()).map_err(|e| geocov::Error::Config(e.to_string()))?;
    let parsed = parse_tle(&text, true)?;
    let snap = GeoSnapshot::from_records(&parsed.records, DEFAULT_MAX_INCLINATION_DEG);
    let g = ctx();
    let mut worst = 0.0f64;
    for lat in -60..=60 {
        let phi = f64::from(lat).to_radians();
        let model = snap.len() as f64 * g.p_vis(phi)?;
        let actual = average_visible_count(&snap, &g, phi)?;
        worst = worst.max((actual - model).abs() / model);
    }
    Ok(check(
        snap.len() == 391 && worst <= 0.05,
        format!(
            "{} filtered records; largest relative gap {:.4} for |lat| <= 60",
            snap.len(),
            worst
        ),
    ))
}

fn c9_numerics() -> geocov::Result<Outcome> {
    let g = ctx();
    let quad = QuadratureSpec::default();
    let mut norm_err = 0.0f64;
    let mut monotone = true;
    let mut poly_err = 0.0f64;
    for lat in [0.0, 30.0, 60.0, 80.0] {
        let phi = f64::to_radians(lat);
        for n in [1, 10, 100, 1000] {
            let serving = DistanceLaw::serving_bpp(g, phi, n)?;
            let r0 = serving.quantile(0.3)?;
            let laws = [
                DistanceLaw::nearest_bpp(g, phi, n)?,
                serving,
                DistanceLaw::interferer_given_r0(g, phi, n, r0)?,
                DistanceLaw::nearest_ppp(g, phi, n)?,
                DistanceLaw::serving_ppp(g, phi, n)?,
            ];
            for law in laws {
                let (lo, hi) = law.support();
                let mass = arc_integral(
                    &g,
                    phi,
                    lo,
                    hi,
                    |r| law.density_of_psi(g.psi(r, phi).unwrap_or(f64::NAN)),
                    &quad,
                )?
                .value;
                // the Poisson nearest distance keeps an atom e^{-N} at r_max
                let atom = if law.kind() == DistanceKind::NearestPpp {
                    (-(n as f64)).exp()
                } else {
                    0.0
                };
                norm_err = norm_err.max((mass + atom - 1.0).abs());
                let mut prev = 0.0;
                for k in 0..=1000 {
                    let r = lo + (hi - lo) * f64::from(k) / 1000.0;
                    let c = law.cdf(r)?;
                    monotone &= c >= prev && (0.0..=1.0).contains(&c);
                    prev = c;
                }
            }
        }
        let coeffs = [1.0, -2.0, 0.5, 3.0, -1.5, 0.25];
        let (lo, hi) = (g.r_min(phi), g.r_max(phi));
        for (a, b) in [(lo, hi), (lo, g.r_vis_max()), (0.5 * (lo + hi), hi)] {
            let got = arc_integral(
                &g,
                phi,
                a,
                b,
                |r| {
                    let p = g.psi(r, phi).unwrap_or(f64::NAN);
                    coeffs.iter().rev().fold(0.0, |acc, c| acc * p + c)
                },
                &quad,
            )?
            .value;
            let exact = polynomial_psi_integral(&coeffs, g.psi(a, phi)?, g.psi(b, phi)?);
            poly_err = poly_err.max((got - exact).abs());
        }
    }
    Ok(check(
        norm_err <= 1e-8 && poly_err <= 1e-10 && monotone,
        format!("density mass error {norm_err:.2e}, polynomial error {poly_err:.2e}, CDFs monotone {monotone}"),
    ))
}

fn run_cli(args: &[&str], out: &Path, config: &Path) -> u8 {
    let mut full: Vec<String> = vec!["geocov".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.extend([
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
        "--seed".into(),
        SEED.to_string(),
    ]);
    geocov::cli::main_with_args(full)
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| {
                    let bytes = std::fs::read(&p).unwrap_or_default();
                    (p.file_name().unwrap_or_default().to_string_lossy().into_owned(), bytes)
                })
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn c10_determinism() -> geocov::Result<Outcome> {
    let tmp = tempfile::tempdir().map_err(|e| geocov::Error::Config(e.to_string()))?;
    let base = tmp.path();
    let tle = fixture();
    let write_cfg = |name: &str, workers: usize| -> PathBuf {
        let p = base.join(name);
        let text = format!(
            "[montecarlo]\nworkers = {workers}\n[distances]\nsamples = 2000\n[tle]\npath = {:?}\n",
            tle.display().to_string()
        );
        std::fs::write(&p, text).expect("write config");
        p
    };
    let one = write_cfg("one.toml", 1);
    let eight = write_cfg("eight.toml", 8);
    let commands: [&[&str]; 5] = [
        &["visibility"],
        &["distances"],
        &["coverage", "--methods", "bpp,ppp,mc", "--trials", "20000"],
        &["tle"],
        &["montecarlo", "--trials", "5000"],
    ];
    let mut pass = true;
    let mut compared = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let dirs = [
            base.join(format!("a{k}")),
            base.join(format!("b{k}")),
            base.join(format!("c{k}")),
        ];
        let codes = [
            run_cli(cmd, &dirs[0], &one),
            run_cli(cmd, &dirs[1], &one),
            run_cli(cmd, &dirs[2], &eight),
        ];
        pass &= codes == [0, 0, 0];
        let outputs: Vec<_> = dirs.iter().map(|d| csv_files(d)).collect();
        pass &= !outputs[0].is_empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
        let manifest = |d: &Path| std::fs::read(d.join(format!("{}_manifest.json", cmd[0]))).ok();
        pass &= manifest(&dirs[0]).is_some() && manifest(&dirs[0]) == manifest(&dirs[1]);
        compared += outputs[0].len();
    }
    Ok(check(
        pass,
        format!("{compared} CSV files identical across reruns and 1 vs 8 workers"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("constants", c1_constants),
        ("distance laws vs simulation", c2_distance_laws),
        ("visibility case probabilities", c3_case_probabilities),
        ("interference Laplace transforms", c4_laplace),
        ("coverage vs simulation", c5_coverage),
        ("Poisson-limit convergence", c6_poisson_limit),
        ("qualitative shapes", c7_shapes),
        ("TLE pipeline", c8_tle),
        ("numerics", c9_numerics),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| check(false, format!("error: {e}")));
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {:>2} {name}: {} [{:.1}s]",
            k + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    }
}
