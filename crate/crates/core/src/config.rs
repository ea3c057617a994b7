//! Run configuration: a TOML file with one table per concern, overridden by
//! command-line flags. Defaults reproduce the reference S-band scenario.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{db_to_linear, dbm_to_watts, pt_from_eirp_density, DistanceUnit, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::GeometryContext;
use crate::quadrature::QuadratureSpec;

/// Inclusive arithmetic grid written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = Self { lo, hi, step };
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::Config(format!("grid {g} has non-finite bounds")));
        }
        if step <= 0.0 || hi < lo {
            return Err(Error::Config(format!("grid {g} needs lo <= hi and step > 0")));
        }
        if (hi - lo) / step > 1e7 {
            return Err(Error::Config(format!("grid {g} has too many points")));
        }
        Ok(g)
    }

    /// Grid points; the last one is `hi` when `hi - lo` is a whole number
    /// of steps up to rounding.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(Error::Config(format!("grid `{s}` is not lo:hi:step")));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("grid `{s}`: `{x}` is not a number")))
        };
        Grid::new(num(lo)?, num(hi)?, num(step)?)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Bpp,
    Ppp,
    Mc,
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bpp" => Ok(Self::Bpp),
            "ppp" => Ok(Self::Ppp),
            "mc" => Ok(Self::Mc),
            other => Err(Error::Config(format!("unknown method `{other}` (bpp, ppp, mc)"))),
        }
    }
}

/// Parses `bpp,ppp,mc`.
pub fn parse_methods(s: &str) -> Result<Vec<MethodName>> {
    let methods = s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(Error::Config("no methods selected".into()));
    }
    Ok(methods)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// SINR threshold in dB.
    Tau,
    /// Number of satellites.
    N,
    /// Terminal latitude in degrees.
    Latitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub earth_radius_km: f64,
    pub altitude_km: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            earth_radius_km: crate::geometry::EARTH_RADIUS_KM,
            altitude_km: crate::geometry::GEO_ALTITUDE_KM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerminalSection {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl Default for TerminalSection {
    fn default() -> Self {
        Self {
            latitude_deg: 37.0,
            longitude_deg: 137.0,
        }
    }
}

/// Link budget in the units it is usually quoted in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub n_sats: usize,
    pub eirp_density_dbw_per_mhz: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Serving-to-interferer gain ratio `G0 / Gn`.
    pub gain_ratio_db: f64,
    pub carrier_hz: f64,
    pub alpha: f64,
    pub bandwidth_hz: f64,
    pub noise_dbm_per_hz: f64,
    pub m: u32,
    pub distance_unit: DistanceUnit,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            n_sats: 100,
            eirp_density_dbw_per_mhz: 59.0,
            tx_gain_dbi: 51.0,
            rx_gain_dbi: 0.0,
            gain_ratio_db: 20.0,
            carrier_hz: 2e9,
            alpha: 3.0,
            bandwidth_hz: 30e6,
            noise_dbm_per_hz: -174.0,
            m: 1,
            distance_unit: DistanceUnit::Kilometers,
        }
    }
}

impl NetworkSection {
    pub fn to_network(&self) -> Result<NetworkConfig> {
        let g_serving = db_to_linear(self.tx_gain_dbi + self.rx_gain_dbi);
        let cfg = NetworkConfig {
            n_sats: self.n_sats,
            tx_power_w: pt_from_eirp_density(self.eirp_density_dbw_per_mhz, self.tx_gain_dbi, self.bandwidth_hz),
            carrier_hz: self.carrier_hz,
            alpha: self.alpha,
            g_serving,
            g_interferer: g_serving / db_to_linear(self.gain_ratio_db),
            bandwidth_hz: self.bandwidth_hz,
            noise_density: dbm_to_watts(self.noise_dbm_per_hz),
            m: self.m,
            distance_unit: self.distance_unit,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 20_231_021,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VisibilitySection {
    pub grid: Grid,
    pub n_values: Vec<usize>,
}

impl Default for VisibilitySection {
    fn default() -> Self {
        Self {
            grid: Grid {
                lo: 0.0,
                hi: 90.0,
                step: 0.5,
            },
            n_values: vec![2, 10, 100],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistancesSection {
    pub latitude_deg: f64,
    pub n_sats: usize,
    /// Number of distance points between `r_min` and `r_max`.
    pub points: usize,
    /// Monte Carlo draws per law; 0 disables the empirical columns.
    pub samples: u64,
    /// Serving distance for the interferer law; the serving median if absent.
    pub r0_km: Option<f64>,
}

impl Default for DistancesSection {
    fn default() -> Self {
        Self {
            latitude_deg: 30.0,
            n_sats: 100,
            points: 201,
            samples: 100_000,
            r0_km: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageSection {
    pub sweep: Sweep,
    pub grid: Grid,
    pub methods: Vec<MethodName>,
    /// Threshold used by the N and latitude sweeps.
    pub tau_db: f64,
}

impl Default for CoverageSection {
    fn default() -> Self {
        Self {
            sweep: Sweep::Tau,
            grid: Grid {
                lo: -10.0,
                hi: 20.0,
                step: 1.0,
            },
            methods: vec![MethodName::Bpp, MethodName::Ppp],
            tau_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TleSection {
    pub path: Option<PathBuf>,
    pub max_inclination_deg: f64,
    pub latitude_grid: Grid,
}

impl Default for TleSection {
    fn default() -> Self {
        Self {
            path: None,
            max_inclination_deg: crate::tle::DEFAULT_MAX_INCLINATION_DEG,
            latitude_grid: Grid {
                lo: -90.0,
                hi: 90.0,
                step: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub terminal: TerminalSection,
    pub network: NetworkSection,
    pub quadrature: QuadratureSpec,
    pub montecarlo: MonteCarloSection,
    pub visibility: VisibilitySection,
    pub distances: DistancesSection,
    pub coverage: CoverageSection,
    pub tle: TleSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        self.network.to_network()?;
        self.quadrature.validate()?;
        if self.montecarlo.workers == Some(0) {
            return Err(Error::Config("montecarlo.workers must be positive".into()));
        }
        for lat in [self.terminal.latitude_deg, self.distances.latitude_deg] {
            if !(-90.0..=90.0).contains(&lat) {
                return Err(Error::Config(format!("latitude {lat} outside [-90, 90]")));
            }
        }
        if self.visibility.n_values.contains(&0) || self.distances.n_sats == 0 {
            return Err(Error::Config("satellite counts must be positive".into()));
        }
        if self.distances.points < 2 {
            return Err(Error::Config("distances.points must be at least 2".into()));
        }
        if self.coverage.methods.is_empty() {
            return Err(Error::Config("coverage.methods is empty".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<GeometryContext> {
        GeometryContext::new(self.geometry.earth_radius_km, self.geometry.altitude_km)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
