//! Command-line front end. Every subcommand writes CSV files plus a JSON
//! manifest into the output directory; identical configuration and seed give
//! byte-identical files.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use crate::analysis::{coverage_bpp, coverage_ppp, CoverageResult};
use crate::channel::{db_to_linear, linear_to_db, NetworkConfig};
use crate::config::{parse_methods, Grid, MethodName, RunConfig, Sweep};
use crate::distance::DistanceLaw;
use crate::error::{Error, Result};
use crate::geometry::{GeometryContext, TerminalPosition};
use crate::montecarlo::{self, McSpec};
use crate::stats::EmpiricalCdf;
use crate::tle::{average_visible_count, parse_tle, GeoSnapshot};

/// Half-width, in serving-distance CDF units, of the band used to condition
/// simulated constellations on `R0 = r0`.
pub const CONDITIONING_HALF_WIDTH: f64 = 0.005;

#[derive(Debug, Parser)]
#[command(name = "geocov", version, about = "Coverage of geostationary satellite networks")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Exit with status 3 when any value fails numerically.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Visible arc length and visibility case probabilities versus latitude.
    Visibility(SweepArgs),
    /// Analytic and simulated CDFs of the nearest, serving and interferer distances.
    Distances(SweepArgs),
    /// Coverage probability swept over threshold, satellite count or latitude.
    Coverage(CoverageArgs),
    /// Real-catalog visibility against the binomial model.
    Tle(TleArgs),
    /// Raw Monte Carlo trials.
    Montecarlo(SweepArgs),
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Sweep grid `lo:hi:step`.
    #[arg(long, value_name = "lo:hi:step", allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// Monte Carlo trials or samples.
    #[arg(long, value_name = "N")]
    pub trials: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub sweep_args: SweepArgs,
    /// Comma-separated subset of bpp, ppp, mc.
    #[arg(long, value_name = "LIST")]
    pub methods: Option<String>,
    /// Swept quantity.
    #[arg(long, value_enum)]
    pub sweep: Option<SweepArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SweepArg {
    Tau,
    N,
    Latitude,
}

#[derive(Debug, Args, Default)]
pub struct TleArgs {
    #[command(flatten)]
    pub sweep_args: SweepArgs,
    /// TLE catalog to read.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    /// Paths relative to the output directory.
    pub output_paths: Vec<String>,
    pub tool_version: String,
    pub details: BTreeMap<String, Value>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: RunManifest,
    /// Values that failed numerically and were written as NaN.
    pub numeric_failures: usize,
}

/// Exit status for an error: 2 configuration, 3 numeric, 4 input parse,
/// 1 anything else.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::Numeric(_) | Error::Convergence { .. } => 3,
        Error::Tle { .. } => 4,
        Error::Io { .. } | Error::Csv(_) => 1,
    }
}

/// Parses arguments, runs, reports, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let strict = cli.strict;
    match run(&cli) {
        Ok(report) => {
            for p in &report.manifest.output_paths {
                println!("{}", cli.out.join(p).display());
            }
            if report.numeric_failures > 0 {
                eprintln!("{} values failed numerically", report.numeric_failures);
                if strict {
                    return 3;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Effective configuration: flags over file over defaults.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.montecarlo.seed = seed;
    }
    match &cli.command {
        Command::Visibility(a) => {
            if let Some(g) = a.grid {
                cfg.visibility.grid = g;
            }
        }
        Command::Distances(a) => {
            if let Some(t) = a.trials {
                cfg.distances.samples = t;
            }
            if a.grid.is_some() {
                return Err(Error::Config("distances takes no --grid".into()));
            }
        }
        Command::Coverage(a) => {
            if let Some(g) = a.sweep_args.grid {
                cfg.coverage.grid = g;
            }
            if let Some(t) = a.sweep_args.trials {
                cfg.montecarlo.trials = t;
            }
            if let Some(m) = &a.methods {
                cfg.coverage.methods = parse_methods(m)?;
            }
            if let Some(s) = a.sweep {
                cfg.coverage.sweep = match s {
                    SweepArg::Tau => Sweep::Tau,
                    SweepArg::N => Sweep::N,
                    SweepArg::Latitude => Sweep::Latitude,
                };
            }
        }
        Command::Tle(a) => {
            if let Some(g) = a.sweep_args.grid {
                cfg.tle.latitude_grid = g;
            }
            if let Some(p) = &a.input {
                cfg.tle.path = Some(p.clone());
            }
        }
        Command::Montecarlo(a) => {
            if let Some(t) = a.trials {
                cfg.montecarlo.trials = t;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    let cfg = resolve_config(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    let (name, mut report) = match &cli.command {
        Command::Visibility(_) => ("visibility", cmd_visibility(&cfg, &cli.out)?),
        Command::Distances(_) => ("distances", cmd_distances(&cfg, &cli.out)?),
        Command::Coverage(_) => ("coverage", cmd_coverage(&cfg, &cli.out)?),
        Command::Tle(_) => ("tle", cmd_tle(&cfg, &cli.out, cli.strict)?),
        Command::Montecarlo(_) => ("montecarlo", cmd_montecarlo(&cfg, &cli.out)?),
    };
    report.manifest.command = name.to_string();
    report.manifest.config_digest = cfg.digest();
    report.manifest.seed = cfg.montecarlo.seed;
    let manifest_name = format!("{name}_manifest.json");
    let mut text = serde_json::to_string_pretty(&report.manifest).expect("manifest serializes");
    text.push('\n');
    let path = cli.out.join(&manifest_name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    report.manifest.output_paths.push(manifest_name);
    Ok(report)
}

fn empty_report() -> RunReport {
    RunReport {
        manifest: RunManifest {
            command: String::new(),
            config_digest: String::new(),
            seed: 0,
            output_paths: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            details: BTreeMap::new(),
        },
        numeric_failures: 0,
    }
}

/// CSV writer with LF line endings.
fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// Shortest round-trip form, `NaN` for failures. Very small and very large
/// magnitudes use exponent notation.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn finish_csv(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn network(cfg: &RunConfig) -> Result<NetworkConfig> {
    cfg.network.to_network()
}

fn terminal(cfg: &RunConfig, ctx: &GeometryContext, latitude_deg: f64) -> Result<TerminalPosition> {
    TerminalPosition::from_degrees(ctx, latitude_deg, cfg.terminal.longitude_deg)
}

fn mc_spec(cfg: &RunConfig, trials: u64) -> McSpec {
    McSpec {
        trials,
        seed: cfg.montecarlo.seed,
        workers: cfg.montecarlo.workers,
    }
}

/// Arc length and case probabilities versus latitude, one file per N.
pub fn cmd_visibility(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    let ctx = cfg.geometry()?;
    let grid = cfg.visibility.grid.points();
    if grid.iter().any(|l| l.abs() > 90.0) {
        return Err(Error::Config("visibility grid leaves [-90, 90]".into()));
    }
    let mut report = empty_report();
    for &n in &cfg.visibility.n_values {
        let name = format!("visibility_n{n}.csv");
        let path = out.join(&name);
        let mut w = csv_writer(&path)?;
        w.write_record([
            "latitude_deg",
            "arc_length_km",
            "p_vis",
            "p_case1",
            "p_case2",
            "p_case3",
        ])?;
        for &lat in &grid {
            let phi = lat.to_radians();
            let cases = ctx.case_probabilities(phi, n)?;
            w.write_record([
                num(lat),
                num(ctx.visible_arc_length(phi)?),
                num(ctx.p_vis(phi)?),
                num(cases.none),
                num(cases.one),
                num(cases.many),
            ])?;
        }
        finish_csv(w, &path)?;
        report.manifest.output_paths.push(name);
    }
    report
        .manifest
        .details
        .insert("rows_per_file".into(), json!(grid.len()));
    Ok(report)
}

/// Analytic and empirical distance CDFs on a grid from `r_min` to `r_max`.
pub fn cmd_distances(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    let ctx = cfg.geometry()?;
    let d = &cfg.distances;
    let phi = d.latitude_deg.to_radians();
    let n = d.n_sats;
    let nearest = DistanceLaw::nearest_bpp(ctx, phi, n)?;
    let serving = DistanceLaw::serving_bpp(ctx, phi, n)?;
    let nearest_ppp = DistanceLaw::nearest_ppp(ctx, phi, n)?;
    let serving_ppp = DistanceLaw::serving_ppp(ctx, phi, n)?;
    let r0 = match d.r0_km {
        Some(r) => r,
        None => serving.quantile(0.5)?,
    };
    let interferer = DistanceLaw::interferer_given_r0(ctx, phi, n, r0)?;

    let mut report = empty_report();
    let (empirical, ks) = if d.samples > 0 {
        let t = terminal(cfg, &ctx, d.latitude_deg)?;
        let spec = mc_spec(cfg, d.samples);
        let draws = montecarlo::sample_distances(&ctx, &t, n, &spec)?;
        let q0 = serving.cdf(r0)?;
        let band = (
            serving.quantile((q0 - CONDITIONING_HALF_WIDTH).max(0.0))?,
            serving.quantile((q0 + CONDITIONING_HALF_WIDTH).min(1.0))?,
        );
        // Rejection keeps about 1% of constellations; cap the effort.
        let cond_spec = mc_spec(cfg, d.samples.saturating_mul(1000));
        let inter = montecarlo::sample_interferers_conditioned(&ctx, &t, n, band, d.samples as usize, &cond_spec)?;
        let e = [
            EmpiricalCdf::new(draws.nearest),
            EmpiricalCdf::new(draws.serving),
            EmpiricalCdf::new(inter),
        ];
        let ks = [
            e[0].ks_against(|r| nearest.cdf(r).unwrap_or(f64::NAN)),
            e[1].ks_against(|r| serving.cdf(r).unwrap_or(f64::NAN)),
            e[2].ks_against(|r| interferer.cdf(r).unwrap_or(f64::NAN)),
        ];
        report.manifest.details.insert(
            "ks".into(),
            json!({"nearest": ks[0], "serving": ks[1], "interferer": ks[2]}),
        );
        report
            .manifest
            .details
            .insert("conditioning_band_km".into(), json!([band.0, band.1]));
        (Some(e), Some(ks))
    } else {
        (None, None)
    };
    if let Some(ks) = ks {
        println!("KS nearest {:.5}  serving {:.5}  interferer {:.5}", ks[0], ks[1], ks[2]);
    }

    let name = "distances.csv".to_string();
    let path = out.join(&name);
    let mut w = csv_writer(&path)?;
    w.write_record([
        "r_km",
        "cdf_nearest",
        "cdf_serving",
        "cdf_interferer",
        "cdf_nearest_ppp",
        "cdf_serving_ppp",
        "emp_nearest",
        "emp_serving",
        "emp_interferer",
    ])?;
    let (lo, hi) = nearest.support();
    let steps = d.points - 1;
    for k in 0..=steps {
        let r = if k == steps {
            hi
        } else {
            lo + (hi - lo) * k as f64 / steps as f64
        };
        let emp = |i: usize| empirical.as_ref().map(|e| e[i].eval(r));
        w.write_record([
            num(r),
            num(nearest.cdf(r)?),
            num(serving.cdf(r)?),
            num(interferer.cdf(r)?),
            num(nearest_ppp.cdf(r)?),
            num(serving_ppp.cdf(r)?),
            opt(emp(0)),
            opt(emp(1)),
            opt(emp(2)),
        ])?;
    }
    finish_csv(w, &path)?;
    report.manifest.output_paths.push(name);
    report.manifest.details.insert("r0_km".into(), json!(r0));
    report.manifest.details.insert("n_sats".into(), json!(n));
    report
        .manifest
        .details
        .insert("latitude_deg".into(), json!(d.latitude_deg));
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    value: f64,
    error: f64,
}

impl Cell {
    fn failed() -> Self {
        Self {
            value: f64::NAN,
            error: f64::NAN,
        }
    }

    fn from_result(r: Result<CoverageResult>, what: &str) -> Self {
        match r {
            Ok(c) => Self {
                value: c.probability,
                error: c.error_estimate,
            },
            Err(e) => {
                log::warn!("{what}: {e}");
                Self::failed()
            }
        }
    }
}

/// Coverage probability over the configured sweep, one column per method.
pub fn cmd_coverage(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    let ctx = cfg.geometry()?;
    let c = &cfg.coverage;
    let base = network(cfg)?;
    let quad = cfg.quadrature;
    let xs = c.grid.points();
    let x_name = match c.sweep {
        Sweep::Tau => "tau_db",
        Sweep::N => "n_sats",
        Sweep::Latitude => "latitude_deg",
    };
    // (network, latitude in degrees, threshold) for each row
    let rows: Vec<(NetworkConfig, f64, f64)> = xs
        .iter()
        .map(|&x| match c.sweep {
            Sweep::Tau => Ok((base.clone(), cfg.terminal.latitude_deg, db_to_linear(x))),
            Sweep::N => {
                if x < 1.0 || x.fract() != 0.0 {
                    return Err(Error::Config(format!("satellite count {x} is not a positive integer")));
                }
                Ok((
                    base.clone().with_n_sats(x as usize),
                    cfg.terminal.latitude_deg,
                    db_to_linear(c.tau_db),
                ))
            }
            Sweep::Latitude => {
                if x.abs() > 90.0 {
                    return Err(Error::Config(format!("latitude {x} outside [-90, 90]")));
                }
                Ok((base.clone(), x, db_to_linear(c.tau_db)))
            }
        })
        .collect::<Result<_>>()?;

    let mut columns: Vec<(MethodName, Vec<Cell>)> = Vec::new();
    for &method in &c.methods {
        let cells: Vec<Cell> = match method {
            MethodName::Bpp | MethodName::Ppp => rows
                .par_iter()
                .map(|(net, lat, tau)| {
                    let f = if method == MethodName::Bpp {
                        coverage_bpp
                    } else {
                        coverage_ppp
                    };
                    let what = format!("{method:?} at {} dB, latitude {lat}", linear_to_db(*tau));
                    Cell::from_result(f(net, &ctx, lat.to_radians(), *tau, &quad), &what)
                })
                .collect(),
            MethodName::Mc => {
                let spec = mc_spec(cfg, cfg.montecarlo.trials);
                let to_cell = |e: montecarlo::McEstimate| Cell {
                    value: e.result.probability,
                    error: e.result.error_estimate,
                };
                if c.sweep == Sweep::Tau {
                    let t = terminal(cfg, &ctx, cfg.terminal.latitude_deg)?;
                    let taus: Vec<f64> = rows.iter().map(|r| r.2).collect();
                    montecarlo::estimate_many(&base, &ctx, &t, &taus, &spec)?
                        .into_iter()
                        .map(to_cell)
                        .collect()
                } else {
                    rows.iter()
                        .map(|(net, lat, tau)| {
                            let t = terminal(cfg, &ctx, *lat)?;
                            montecarlo::estimate(net, &ctx, &t, *tau, &spec).map(to_cell)
                        })
                        .collect::<Result<_>>()?
                }
            }
        };
        columns.push((method, cells));
    }

    let mut report = empty_report();
    let name = "coverage.csv".to_string();
    let path = out.join(&name);
    let mut w = csv_writer(&path)?;
    let mut header = vec![x_name.to_string()];
    header.extend(columns.iter().map(|(m, _)| label(*m).to_string()));
    w.write_record(&header)?;
    for (k, x) in xs.iter().enumerate() {
        let mut rec = vec![num(*x)];
        rec.extend(columns.iter().map(|(_, cells)| num(cells[k].value)));
        w.write_record(&rec)?;
    }
    finish_csv(w, &path)?;
    report.manifest.output_paths.push(name);
    for (m, cells) in &columns {
        let key = match m {
            MethodName::Mc => "mc_ci95_half_width".to_string(),
            other => format!("{}_quadrature_error", label(*other)),
        };
        let errs: Vec<Value> = cells
            .iter()
            .map(|c| if c.error.is_nan() { Value::Null } else { json!(c.error) })
            .collect();
        report.manifest.details.insert(key, Value::Array(errs));
        report.numeric_failures += cells.iter().filter(|c| c.value.is_nan()).count();
    }
    report
        .manifest
        .details
        .insert("network_digest".into(), json!(base.digest()));
    Ok(report)
}

fn label(m: MethodName) -> &'static str {
    match m {
        MethodName::Bpp => "bpp",
        MethodName::Ppp => "ppp",
        MethodName::Mc => "mc",
    }
}

/// Sub-satellite longitudes and average visible counts from a TLE catalog.
pub fn cmd_tle(cfg: &RunConfig, out: &Path, strict: bool) -> Result<RunReport> {
    let ctx = cfg.geometry()?;
    let path = cfg
        .tle
        .path
        .as_ref()
        .ok_or_else(|| Error::Config("no TLE input: set tle.path or pass --input".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_tle(&text, strict)?;
    let snapshot = GeoSnapshot::from_records(&parsed.records, cfg.tle.max_inclination_deg);
    if snapshot.is_empty() {
        return Err(Error::Config(format!(
            "{}: no records below {} deg inclination",
            path.display(),
            cfg.tle.max_inclination_deg
        )));
    }
    let mut report = empty_report();

    let name = "tle_longitudes.csv".to_string();
    let lpath = out.join(&name);
    let mut w = csv_writer(&lpath)?;
    w.write_record(["longitude_deg"])?;
    for l in &snapshot.longitudes {
        w.write_record([num(l.to_degrees())])?;
    }
    finish_csv(w, &lpath)?;
    report.manifest.output_paths.push(name);

    let lats = cfg.tle.latitude_grid.points();
    if lats.iter().any(|l| l.abs() > 90.0) {
        return Err(Error::Config("TLE latitude grid leaves [-90, 90]".into()));
    }
    let n = snapshot.len() as f64;
    let rows: Vec<(f64, f64, f64)> = lats
        .iter()
        .map(|&lat| {
            let phi = lat.to_radians();
            Ok((lat, average_visible_count(&snapshot, &ctx, phi)?, n * ctx.p_vis(phi)?))
        })
        .collect::<Result<_>>()?;
    let name = "tle_visible.csv".to_string();
    let vpath = out.join(&name);
    let mut w = csv_writer(&vpath)?;
    w.write_record(["latitude_deg", "avg_visible_actual", "avg_visible_bpp"])?;
    for (lat, actual, bpp) in rows {
        w.write_record([num(lat), num(actual), num(bpp)])?;
    }
    finish_csv(w, &vpath)?;
    report.manifest.output_paths.push(name);

    let d = &mut report.manifest.details;
    d.insert("source_records".into(), json!(snapshot.source_count));
    d.insert("geostationary_count".into(), json!(snapshot.len()));
    d.insert("rejected_mean_motion".into(), json!(snapshot.rejected));
    d.insert("max_inclination_deg".into(), json!(snapshot.max_inclination_deg));
    d.insert("parse_issues".into(), json!(parsed.issues));
    println!("{} near-geostationary satellites", snapshot.len());
    Ok(report)
}

/// One row per simulated trial at the configured terminal and threshold.
pub fn cmd_montecarlo(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    let ctx = cfg.geometry()?;
    let net = network(cfg)?;
    let t = terminal(cfg, &ctx, cfg.terminal.latitude_deg)?;
    let tau = db_to_linear(cfg.coverage.tau_db);
    let seed = cfg.montecarlo.seed;
    let trials = cfg.montecarlo.trials;
    if trials == 0 {
        return Err(Error::Config("montecarlo needs at least one trial".into()));
    }
    let job = || {
        (0..trials)
            .into_par_iter()
            .map(|i| montecarlo::run_trial(&net, &ctx, &t, tau, &mut montecarlo::trial_rng(seed, i)))
            .collect::<Result<Vec<_>>>()
    };
    let outcomes = match cfg.montecarlo.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(job)?,
        None => job()?,
    };

    let mut report = empty_report();
    let name = "montecarlo_trials.csv".to_string();
    let path = out.join(&name);
    let mut w = csv_writer(&path)?;
    w.write_record([
        "trial",
        "case",
        "serving_distance_km",
        "interferers",
        "sinr_db",
        "covered",
    ])?;
    let mut covered = 0u64;
    for (i, o) in outcomes.iter().enumerate() {
        covered += u64::from(o.covered);
        let case = match o.case {
            montecarlo::VisibilityCase::NoVisible => "1",
            montecarlo::VisibilityCase::OneVisible => "2",
            montecarlo::VisibilityCase::ManyVisible => "3",
        };
        let sinr_db = if o.sinr > 0.0 {
            num(linear_to_db(o.sinr))
        } else {
            String::new()
        };
        w.write_record([
            i.to_string(),
            case.to_string(),
            opt(o.serving_distance),
            o.interferer_distances.len().to_string(),
            sinr_db,
            u8::from(o.covered).to_string(),
        ])?;
    }
    finish_csv(w, &path)?;
    report.manifest.output_paths.push(name);
    let d = &mut report.manifest.details;
    d.insert("trials".into(), json!(trials));
    d.insert("tau_db".into(), json!(cfg.coverage.tau_db));
    d.insert("coverage".into(), json!(covered as f64 / trials as f64));
    Ok(report)
}
