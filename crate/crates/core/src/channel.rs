//! Link budget and fading.
//!
//! Everything here is in linear units. Distances arrive in kilometres from the
//! geometry and are rescaled to the configured path-loss unit only inside
//! [`NetworkConfig::path_loss`].

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Length unit in which the distance enters `r^-alpha`.
///
/// With a non-square-law exponent the received power depends on this unit.
/// The reference link budget (alpha = 3, 2 GHz, 52.77 dBm, 51 dBi) only gives
/// usable SNRs at GEO range when distances are expressed in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceUnit {
    #[default]
    Kilometers,
    Meters,
}

impl DistanceUnit {
    fn per_km(self) -> f64 {
        match self {
            DistanceUnit::Kilometers => 1.0,
            DistanceUnit::Meters => 1_000.0,
        }
    }
}

/// Network and link parameters shared by the analysis and the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_sats: usize,
    /// Transmit power per satellite, W.
    pub tx_power_w: f64,
    pub carrier_hz: f64,
    pub alpha: f64,
    /// Effective gain toward the terminal of the serving satellite.
    pub g_serving: f64,
    /// Effective gain of every interfering satellite.
    pub g_interferer: f64,
    pub bandwidth_hz: f64,
    /// Noise spectral density, W/Hz.
    pub noise_density: f64,
    /// Nakagami shape parameter.
    pub m: u32,
    pub distance_unit: DistanceUnit,
}

impl NetworkConfig {
    /// Reference S-band parameters with the given satellite count and
    /// serving-to-interferer gain ratio.
    ///
    /// 2 GHz carrier, alpha = 3, 30 MHz bandwidth, -174 dBm/Hz noise,
    /// 51 dBi serving transmit gain, 0 dBi terminal gain, and a transmit
    /// power derived from an EIRP density of 59 dBW/MHz.
    pub fn reference(n_sats: usize, gain_ratio_db: f64) -> Self {
        let g_serving = db_to_linear(51.0 + 0.0);
        Self {
            n_sats,
            tx_power_w: pt_from_eirp_density(59.0, 51.0, 30e6),
            carrier_hz: 2e9,
            alpha: 3.0,
            g_serving,
            g_interferer: g_serving / db_to_linear(gain_ratio_db),
            bandwidth_hz: 30e6,
            noise_density: dbm_to_watts(-174.0),
            m: 1,
            distance_unit: DistanceUnit::Kilometers,
        }
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_n_sats(mut self, n_sats: usize) -> Self {
        self.n_sats = n_sats;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tx_power_w", self.tx_power_w),
            ("carrier_hz", self.carrier_hz),
            ("g_serving", self.g_serving),
            ("g_interferer", self.g_interferer),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.noise_density.is_finite() && self.noise_density >= 0.0) {
            return Err(Error::Config("noise_density must be non-negative".into()));
        }
        if self.n_sats == 0 {
            return Err(Error::Config("n_sats must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= 2.0) {
            return Err(Error::Config(format!("alpha must be >= 2, got {}", self.alpha)));
        }
        if self.m == 0 {
            return Err(Error::Config("Nakagami m must be a positive integer".into()));
        }
        if self.g_serving < self.g_interferer {
            return Err(Error::Config(
                "serving gain must not be below the interferer gain".into(),
            ));
        }
        Ok(())
    }

    pub fn fading(&self) -> Nakagami {
        Nakagami { m: self.m }
    }

    /// Noise power `N0 * W`, W.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.bandwidth_hz
    }

    /// `(c / (4 pi f_c))^2 r^-alpha` with `r_km` expressed in the configured unit.
    pub fn path_loss(&self, r_km: f64) -> Result<f64> {
        if !(r_km.is_finite() && r_km > 0.0) {
            return Err(Error::domain(format!("distance must be positive, got {r_km}")));
        }
        Ok(self.path_loss_unchecked(r_km))
    }

    pub(crate) fn path_loss_unchecked(&self, r_km: f64) -> f64 {
        let k = SPEED_OF_LIGHT / (4.0 * PI * self.carrier_hz);
        k * k * (r_km * self.distance_unit.per_km()).powf(-self.alpha)
    }

    /// Mean received power from a satellite with gain `gain` at `r_km`.
    pub fn mean_rx_power(&self, gain: f64, r_km: f64) -> f64 {
        self.tx_power_w * gain * self.path_loss_unchecked(r_km)
    }

    /// Short digest of the configuration, stable across runs.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

/// Transmit power in watts from an EIRP density `P_t G_t0 / W`.
pub fn pt_from_eirp_density(eirp_dbw_per_mhz: f64, g_t0_dbi: f64, bandwidth_hz: f64) -> f64 {
    let dbw = eirp_dbw_per_mhz + linear_to_db(bandwidth_hz / 1e6) - g_t0_dbi;
    db_to_linear(dbw)
}

/// Nakagami shape for a Rician factor `k`, rounded to the nearest integer.
pub fn rician_k_to_m(k: f64) -> Result<u32> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain(format!("Rician K must be non-negative, got {k}")));
    }
    let exact = (k + 1.0).powi(2) / (2.0 * k + 1.0);
    let m = exact.round().max(1.0);
    if (exact - m).abs() > 1e-9 {
        log::warn!("Rician K = {k} maps to m = {exact:.4}; rounded to {m}");
    }
    Ok(m as u32)
}

/// Unit-mean Nakagami-m power gain, i.e. Gamma(shape m, rate m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Nakagami {
    pub m: u32,
}

impl Nakagami {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("Nakagami m must be a positive integer"));
        }
        Ok(Self { m })
    }

    /// `m (m!)^(-1/m)`.
    pub fn nu(&self) -> f64 {
        let m = self.m as f64;
        let ln_fact: f64 = (1..=self.m).map(|k| (k as f64).ln()).sum();
        m * (-ln_fact / m).exp()
    }

    /// `1 - e^{-m x} sum_{k<m} (m x)^k / k!`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain(format!("gain must be non-negative, got {x}")));
        }
        let mx = self.m as f64 * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..self.m {
            term *= mx / k as f64;
            sum += term;
        }
        Ok((1.0 - (-mx).exp() * sum).clamp(0.0, 1.0))
    }

    /// `1 - sum_{i=1}^{m} C(m,i) (-1)^{i+1} e^{-nu i x}`.
    pub fn cdf_approx(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain(format!("gain must be non-negative, got {x}")));
        }
        let nu = self.nu();
        let tail: f64 = (1..=self.m)
            .map(|i| alternating_binomial(self.m, i) * (-nu * i as f64 * x).exp())
            .sum();
        Ok(1.0 - tail)
    }

    /// `E[e^{-s h}] = (m / (m + s))^m`.
    pub fn laplace(&self, s: f64) -> f64 {
        let m = self.m as f64;
        (m / (m + s)).powi(self.m as i32)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.m as f64;
        Gamma::new(m, 1.0 / m).expect("m > 0").sample(rng)
    }
}

/// `C(m, i) (-1)^{i+1}`.
pub(crate) fn alternating_binomial(m: u32, i: u32) -> f64 {
    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
    sign * binomial(m as u64, i as u64)
}

pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// A satellite link as seen by the terminal: fading gain and distance in km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub gain: f64,
    pub distance_km: f64,
}

/// Received SINR: zero without a serving satellite, SNR without interferers.
pub fn sinr(cfg: &NetworkConfig, serving: Option<Link>, interferers: &[Link]) -> f64 {
    let Some(s) = serving else {
        return 0.0;
    };
    let signal = s.gain * cfg.mean_rx_power(cfg.g_serving, s.distance_km);
    let interference: f64 = interferers
        .iter()
        .map(|l| l.gain * cfg.mean_rx_power(cfg.g_interferer, l.distance_km))
        .sum();
    signal / (interference + cfg.noise_power())
}
