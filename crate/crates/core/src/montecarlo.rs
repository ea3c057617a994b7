//! Monte Carlo ground truth for the analytical results.
//!
//! Every trial draws a fresh constellation from its own ChaCha8 substream,
//! keyed by `(seed, trial_index)`, so results do not depend on how trials are
//! spread over threads. Counts are aggregated as integers and divided once at
//! the end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::analysis::{CoverageResult, Method};
use crate::channel::{linear_to_db, sinr, Link, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{GeometryContext, TerminalPosition};
use crate::stats::{wilson_interval, Z_95};

/// Trials handled per parallel batch in the rejection samplers.
const BATCH: u64 = 1 << 14;

/// Satellite azimuths on the geostationary circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constellation {
    pub azimuths: Vec<f64>,
    pub orbit_radius: f64,
}

impl Constellation {
    pub fn len(&self) -> usize {
        self.azimuths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.azimuths.is_empty()
    }

    pub fn positions<'a>(&'a self, ctx: &'a GeometryContext) -> impl Iterator<Item = [f64; 3]> + 'a {
        self.azimuths.iter().map(|&a| ctx.satellite_position(a))
    }
}

/// I.i.d. uniform azimuths in `[0, 2 pi)`.
pub fn draw_constellation<R: Rng + ?Sized>(ctx: &GeometryContext, n_sats: usize, rng: &mut R) -> Result<Constellation> {
    if n_sats == 0 {
        return Err(Error::domain("a constellation needs at least one satellite"));
    }
    Ok(Constellation {
        azimuths: (0..n_sats).map(|_| rng.random::<f64>() * TAU).collect(),
        orbit_radius: ctx.orbit_radius(),
    })
}

/// Number of visible satellites in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VisibilityCase {
    NoVisible,
    OneVisible,
    ManyVisible,
}

impl VisibilityCase {
    fn from_count(n: usize) -> Self {
        match n {
            0 => Self::NoVisible,
            1 => Self::OneVisible,
            _ => Self::ManyVisible,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub case: VisibilityCase,
    pub serving_distance: Option<f64>,
    pub interferer_distances: Vec<f64>,
    pub sinr: f64,
    pub covered: bool,
}

/// Distances of the visible satellites, nearest first is not guaranteed;
/// `serving` indexes into `visible`.
struct Geometry {
    nearest: f64,
    visible: Vec<(usize, f64)>,
    serving: Option<usize>,
}

fn classify(ctx: &GeometryContext, terminal: &TerminalPosition, c: &Constellation) -> Geometry {
    let mut nearest = f64::INFINITY;
    let mut visible: Vec<(usize, f64)> = Vec::new();
    let mut serving: Option<usize> = None;
    for (i, p) in c.positions(ctx).enumerate() {
        let d = terminal.distance_to(p);
        nearest = nearest.min(d);
        if terminal.sees(p) {
            // strict < keeps the lowest index on ties
            if serving.is_none_or(|s| d < visible[s].1) {
                serving = Some(visible.len());
            }
            visible.push((i, d));
        }
    }
    Geometry {
        nearest,
        visible,
        serving,
    }
}

/// The substream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Draw {
    geo: Geometry,
    serving: Option<Link>,
    interferers: Vec<Link>,
}

impl Draw {
    fn sinr(&self, cfg: &NetworkConfig) -> f64 {
        sinr(cfg, self.serving, &self.interferers)
    }

    fn interference(&self, cfg: &NetworkConfig) -> f64 {
        self.interferers
            .iter()
            .map(|l| l.gain * cfg.mean_rx_power(cfg.g_interferer, l.distance_km))
            .sum()
    }
}

fn simulate<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    rng: &mut R,
) -> Result<Draw> {
    let constellation = draw_constellation(ctx, cfg.n_sats, rng)?;
    let geo = classify(ctx, terminal, &constellation);
    // One gain per satellite, drawn in index order, keeps the stream layout
    // independent of which satellites turn out visible.
    let fading = cfg.fading();
    let gains: Vec<f64> = (0..cfg.n_sats).map(|_| fading.sample(rng)).collect();
    let link = |&(i, d): &(usize, f64)| Link {
        gain: gains[i],
        distance_km: d,
    };
    let serving = geo.serving.map(|s| link(&geo.visible[s]));
    let interferers = geo
        .visible
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != geo.serving)
        .map(|(_, v)| link(v))
        .collect();
    Ok(Draw {
        geo,
        serving,
        interferers,
    })
}

/// One draw of the full link model.
pub fn run_trial<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    tau: f64,
    rng: &mut R,
) -> Result<TrialOutcome> {
    cfg.validate()?;
    let draw = simulate(cfg, ctx, terminal, rng)?;
    let value = draw.sinr(cfg);
    Ok(TrialOutcome {
        case: VisibilityCase::from_count(draw.geo.visible.len()),
        serving_distance: draw.serving.map(|l| l.distance_km),
        interferer_distances: draw.interferers.iter().map(|l| l.distance_km).collect(),
        sinr: value,
        covered: draw.serving.is_some() && value >= tau,
    })
}

/// Trial count, seed and worker count for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSpec {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McSpec {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("Monte Carlo needs at least one trial".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        Ok(())
    }

    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
                .map(|pool| pool.install(job)),
        }
    }
}

/// A Monte Carlo coverage estimate with its Wilson 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub result: CoverageResult,
    pub successes: u64,
    pub trials: u64,
    pub interval: (f64, f64),
}

/// Coverage probability at one threshold.
pub fn estimate(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    tau: f64,
    spec: &McSpec,
) -> Result<McEstimate> {
    Ok(estimate_many(cfg, ctx, terminal, &[tau], spec)?.remove(0))
}

/// Coverage probabilities at several thresholds from one set of trials.
pub fn estimate_many(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    taus: &[f64],
    spec: &McSpec,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    spec.validate()?;
    if taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::domain("thresholds must be positive"));
    }
    let counts = spec.run(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(spec.seed, i);
                let draw = simulate(cfg, ctx, terminal, &mut rng)?;
                let value = draw.sinr(cfg);
                Ok::<_, Error>(
                    taus.iter()
                        .map(|&t| u64::from(draw.serving.is_some() && value >= t))
                        .collect::<Vec<u64>>(),
                )
            })
            .try_reduce(
                || vec![0; taus.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )
    })??;
    let digest = cfg.digest();
    Ok(taus
        .iter()
        .zip(counts)
        .map(|(&tau, successes)| {
            let interval = wilson_interval(successes, spec.trials, Z_95);
            McEstimate {
                result: CoverageResult {
                    threshold_db: linear_to_db(tau),
                    probability: successes as f64 / spec.trials as f64,
                    method: Method::MonteCarlo,
                    error_estimate: 0.5 * (interval.1 - interval.0),
                    config_digest: digest.clone(),
                    no_visible_arc: !ctx.sees_orbit(terminal.latitude()),
                },
                successes,
                trials: spec.trials,
                interval,
            }
        })
        .collect())
}

/// Counts of trials with no, one, and several visible satellites.
pub fn case_frequencies(
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    n_sats: usize,
    spec: &McSpec,
) -> Result<[u64; 3]> {
    spec.validate()?;
    spec.run(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let c = draw_constellation(ctx, n_sats, &mut trial_rng(spec.seed, i))?;
                let visible = c.positions(ctx).filter(|&p| terminal.sees(p)).count();
                let mut out = [0u64; 3];
                out[VisibilityCase::from_count(visible).index()] = 1;
                Ok(out)
            })
            .try_reduce(|| [0; 3], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]))
    })?
}

/// Empirical nearest and serving distances.
#[derive(Debug, Clone, Default)]
pub struct DistanceSamples {
    /// Nearest satellite, visible or not; one per trial.
    pub nearest: Vec<f64>,
    /// Nearest visible satellite; one per trial with a visible satellite.
    pub serving: Vec<f64>,
}

pub fn sample_distances(
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    n_sats: usize,
    spec: &McSpec,
) -> Result<DistanceSamples> {
    spec.validate()?;
    let pairs: Vec<(f64, Option<f64>)> = spec.run(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let c = draw_constellation(ctx, n_sats, &mut trial_rng(spec.seed, i))?;
                let g = classify(ctx, terminal, &c);
                Ok((g.nearest, g.serving.map(|s| g.visible[s].1)))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out = DistanceSamples::default();
    for (n, s) in pairs {
        out.nearest.push(n);
        out.serving.extend(s);
    }
    Ok(out)
}

/// Per-trial results from constellations whose serving distance falls in
/// `serving_band`, found by rejection and kept in trial order. Used to
/// approximate conditioning on `R0 = r0`; the band width is the accuracy
/// knob. Stops once `enough` holds or `spec.trials` trials have been drawn.
fn conditioned_trials<T, F>(
    spec: &McSpec,
    serving_band: (f64, f64),
    enough: impl Fn(&[T]) -> bool + Send + Sync,
    per_trial: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<Option<(f64, T)>> + Sync + Send,
{
    spec.validate()?;
    let (lo, hi) = serving_band;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::domain("conditioning band is reversed"));
    }
    spec.run(|| {
        let mut accepted = Vec::new();
        let mut start = 0u64;
        while !enough(&accepted) {
            if start >= spec.trials {
                return Err(Error::Numeric(format!(
                    "conditioning band [{lo:.3}, {hi:.3}] km accepted only {} of {} trials",
                    accepted.len(),
                    spec.trials
                )));
            }
            let end = (start + BATCH).min(spec.trials);
            let batch = (start..end)
                .into_par_iter()
                .map(|i| {
                    let got = per_trial(&mut trial_rng(spec.seed, i))?;
                    Ok(got.filter(|(r0, _)| (lo..=hi).contains(r0)).map(|(_, t)| t))
                })
                .collect::<Result<Vec<_>>>()?;
            accepted.extend(batch.into_iter().flatten());
            start = end;
        }
        Ok(accepted)
    })?
}

/// Interferer distances from constellations whose serving distance lies in
/// `serving_band`; exactly `wanted` values, in trial order. `spec.trials`
/// caps the number of constellations drawn.
pub fn sample_interferers_conditioned(
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    n_sats: usize,
    serving_band: (f64, f64),
    wanted: usize,
    spec: &McSpec,
) -> Result<Vec<f64>> {
    let groups = conditioned_trials(
        spec,
        serving_band,
        |acc: &[Vec<f64>]| acc.iter().map(Vec::len).sum::<usize>() >= wanted,
        |rng| {
            let c = draw_constellation(ctx, n_sats, rng)?;
            let g = classify(ctx, terminal, &c);
            Ok(g.serving.map(|s| {
                let others = g
                    .visible
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != s)
                    .map(|(_, &(_, d))| d)
                    .collect();
                (g.visible[s].1, others)
            }))
        },
    )?;
    let mut out: Vec<f64> = groups.into_iter().flatten().collect();
    out.truncate(wanted);
    Ok(out)
}

/// Monte Carlo `E[exp(-s I) | R0 in serving_band]` for each `s`, with the
/// standard error of each mean, over `samples` accepted constellations.
pub fn laplace_interference_mc(
    cfg: &NetworkConfig,
    ctx: &GeometryContext,
    terminal: &TerminalPosition,
    serving_band: (f64, f64),
    s_values: &[f64],
    samples: usize,
    spec: &McSpec,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let mut interference = conditioned_trials(
        spec,
        serving_band,
        |acc: &[f64]| acc.len() >= samples,
        |rng| {
            let draw = simulate(cfg, ctx, terminal, rng)?;
            Ok(draw.serving.map(|l| (l.distance_km, draw.interference(cfg))))
        },
    )?;
    interference.truncate(samples);
    Ok(s_values
        .iter()
        .map(|&s| {
            let xs: Vec<f64> = interference.iter().map(|i| (-s * i).exp()).collect();
            crate::stats::mean_and_stderr(&xs)
        })
        .collect())
}
