//! Two-line element sets and the geostationary snapshot built from them.
//!
//! Only what the visibility comparison needs: parsing with checksum
//! validation, a near-GEO filter, and a coarse sub-satellite longitude from
//! the mean elements and Greenwich mean sidereal time. No orbit propagation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result, TleErrorKind};
use crate::geometry::{GeometryContext, TerminalPosition};

/// Characters in each element line.
pub const LINE_LEN: usize = 69;
/// Sidereal mean motion of a geostationary orbit, rev/day.
pub const GEO_MEAN_MOTION: f64 = 1.002_7;
/// Accepted deviation from [`GEO_MEAN_MOTION`].
pub const GEO_MEAN_MOTION_TOL: f64 = 0.01;
/// Inclination cut used for the geostationary snapshot, degrees.
pub const DEFAULT_MAX_INCLINATION_DEG: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TleRecord {
    pub name: String,
    pub catalog_number: u32,
    pub classification: char,
    pub intl_designator: String,
    /// Four-digit epoch year.
    pub epoch_year: i32,
    /// Fractional day of year, 1.0 being January 1st 00:00 UTC.
    pub epoch_day: f64,
    pub mean_motion_dot: f64,
    pub mean_motion_ddot: f64,
    pub bstar: f64,
    pub ephemeris_type: u8,
    pub element_set: u16,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    /// Revolutions per day.
    pub mean_motion: f64,
    pub revolution_number: u32,
}

/// Modulo-10 checksum over the first 68 characters: digits count their
/// value, minus signs count one.
pub fn checksum(line: &str) -> u8 {
    let sum: u32 = line
        .bytes()
        .take(LINE_LEN - 1)
        .map(|b| match b {
            b'0'..=b'9' => u32::from(b - b'0'),
            b'-' => 1,
            _ => 0,
        })
        .sum();
    (sum % 10) as u8
}

fn field(line: &str, from: usize, to: usize) -> &str {
    // columns are 1-based and inclusive
    &line[from - 1..to]
}

fn parse_f64(s: &str, name: &'static str) -> Result<f64, TleErrorKind> {
    s.trim().parse().map_err(|_| TleErrorKind::Field(name))
}

fn parse_int<T: std::str::FromStr>(s: &str, name: &'static str) -> Result<T, TleErrorKind> {
    let t = s.trim();
    if t.is_empty() {
        return "0".parse().map_err(|_| TleErrorKind::Field(name));
    }
    t.parse().map_err(|_| TleErrorKind::Field(name))
}

/// Decimal point assumed: `" 12345-3"` is `0.12345e-3`.
fn parse_exp(s: &str, name: &'static str) -> Result<f64, TleErrorKind> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(0.0);
    }
    let (sign, rest) = match t.as_bytes()[0] {
        b'-' => (-1.0, &t[1..]),
        b'+' => (1.0, &t[1..]),
        _ => (1.0, t),
    };
    let split = rest
        .rfind(['-', '+'])
        .filter(|&i| i > 0)
        .ok_or(TleErrorKind::Field(name))?;
    let (mant, exp) = rest.split_at(split);
    let mant: f64 = format!("0.{mant}").parse().map_err(|_| TleErrorKind::Field(name))?;
    let exp: i32 = exp.parse().map_err(|_| TleErrorKind::Field(name))?;
    Ok(sign * mant * 10f64.powi(exp))
}

fn format_exp(x: f64) -> String {
    if x == 0.0 {
        return " 00000-0".into();
    }
    let sign = if x < 0.0 { '-' } else { ' ' };
    let a = x.abs();
    let mut exp = a.log10().floor() as i32 + 1;
    let mut mant = (a / 10f64.powi(exp) * 1e5).round() as u32;
    if mant >= 100_000 {
        mant /= 10;
        exp += 1;
    }
    let esign = if exp < 0 { '-' } else { '+' };
    let esign = if exp == 0 { '-' } else { esign };
    format!("{sign}{mant:05}{esign}{}", exp.abs())
}

/// `" .00000123"` / `"-.00000123"`.
fn format_ndot(x: f64) -> String {
    let sign = if x < 0.0 { '-' } else { ' ' };
    let digits = format!("{:.8}", x.abs());
    format!("{sign}{}", &digits[1..])
}

fn parse_line1(line: &str) -> Result<(u32, TleRecord), TleErrorKind> {
    let catalog = parse_int(field(line, 3, 7), "catalog number")?;
    let yy: i32 = parse_int(field(line, 19, 20), "epoch year")?;
    let rec = TleRecord {
        name: String::new(),
        catalog_number: catalog,
        classification: line.as_bytes()[7] as char,
        intl_designator: field(line, 10, 17).trim_end().to_string(),
        epoch_year: if yy < 57 { 2000 + yy } else { 1900 + yy },
        epoch_day: parse_f64(field(line, 21, 32), "epoch day")?,
        mean_motion_dot: parse_f64(field(line, 34, 43), "mean motion derivative")?,
        mean_motion_ddot: parse_exp(field(line, 45, 52), "mean motion second derivative")?,
        bstar: parse_exp(field(line, 54, 61), "drag term")?,
        ephemeris_type: parse_int(field(line, 63, 63), "ephemeris type")?,
        element_set: parse_int(field(line, 65, 68), "element set number")?,
        inclination_deg: 0.0,
        raan_deg: 0.0,
        eccentricity: 0.0,
        arg_perigee_deg: 0.0,
        mean_anomaly_deg: 0.0,
        mean_motion: 0.0,
        revolution_number: 0,
    };
    Ok((catalog, rec))
}

fn parse_line2(line: &str, rec: &mut TleRecord) -> Result<(), TleErrorKind> {
    let catalog: u32 = parse_int(field(line, 3, 7), "catalog number")?;
    if catalog != rec.catalog_number {
        return Err(TleErrorKind::CatalogMismatch);
    }
    rec.inclination_deg = parse_f64(field(line, 9, 16), "inclination")?;
    rec.raan_deg = parse_f64(field(line, 18, 25), "right ascension")?;
    let ecc = field(line, 27, 33).trim();
    if ecc.is_empty() || !ecc.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TleErrorKind::Field("eccentricity"));
    }
    rec.eccentricity = parse_f64(&format!("0.{ecc}"), "eccentricity")?;
    rec.arg_perigee_deg = parse_f64(field(line, 35, 42), "argument of perigee")?;
    rec.mean_anomaly_deg = parse_f64(field(line, 44, 51), "mean anomaly")?;
    rec.mean_motion = parse_f64(field(line, 53, 63), "mean motion")?;
    rec.revolution_number = parse_int(field(line, 64, 68), "revolution number")?;
    Ok(())
}

fn check_line(line: &str, number: char) -> Result<(), TleErrorKind> {
    if !line.is_ascii() {
        return Err(TleErrorKind::Field("non-ASCII character"));
    }
    if line.len() != LINE_LEN {
        return Err(TleErrorKind::LineLength(line.len()));
    }
    let b = line.as_bytes();
    if b[0] as char != number || b[1] != b' ' {
        return Err(TleErrorKind::LineNumber { expected: number });
    }
    let stated = b[LINE_LEN - 1].wrapping_sub(b'0');
    if stated > 9 {
        return Err(TleErrorKind::Field("checksum"));
    }
    let computed = checksum(line);
    if computed != stated {
        return Err(TleErrorKind::Checksum { computed, stated });
    }
    Ok(())
}

impl TleRecord {
    /// The two element lines, checksums included.
    pub fn to_lines(&self) -> (String, String) {
        let mut l1 = String::with_capacity(LINE_LEN);
        let _ = write!(
            l1,
            "1 {:05}{} {:<8} {:02}{:012.8} {} {} {} {} {:>4}",
            self.catalog_number,
            self.classification,
            self.intl_designator,
            self.epoch_year % 100,
            self.epoch_day,
            format_ndot(self.mean_motion_dot),
            format_exp(self.mean_motion_ddot),
            format_exp(self.bstar),
            self.ephemeris_type,
            self.element_set,
        );
        let mut l2 = String::with_capacity(LINE_LEN);
        let ecc = format!("{:.7}", self.eccentricity);
        let _ = write!(
            l2,
            "2 {:05} {:8.4} {:8.4} {} {:8.4} {:8.4} {:11.8}{:>5}",
            self.catalog_number,
            self.inclination_deg,
            self.raan_deg,
            &ecc[2..],
            self.arg_perigee_deg,
            self.mean_anomaly_deg,
            self.mean_motion,
            self.revolution_number,
        );
        let c1 = checksum(&l1);
        let c2 = checksum(&l2);
        l1.push(char::from(b'0' + c1));
        l2.push(char::from(b'0' + c2));
        (l1, l2)
    }

    /// Julian date of the epoch (UTC, used as UT1).
    pub fn epoch_jd(&self) -> f64 {
        julian_date(self.epoch_year, 1, 1) - 1.0 + self.epoch_day
    }

    pub fn is_near_geostationary(&self, max_inclination_deg: f64) -> bool {
        self.inclination_deg < max_inclination_deg && (self.mean_motion - GEO_MEAN_MOTION).abs() <= GEO_MEAN_MOTION_TOL
    }
}

/// A problem with one TLE group that was skipped in lenient mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TleIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedTle {
    pub records: Vec<TleRecord>,
    pub issues: Vec<TleIssue>,
}

/// Parses 2-line and 3-line (named) TLE groups.
///
/// In strict mode the first malformed group is an error; otherwise it is
/// skipped and reported in [`ParsedTle::issues`] with its line number.
pub fn parse_tle(text: &str, strict: bool) -> Result<ParsedTle> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut out = ParsedTle::default();
    let mut i = 0;
    while i < lines.len() {
        let (start, first) = lines[i];
        let (name, l1_idx) = if first.starts_with("1 ") {
            (String::new(), i)
        } else if first.starts_with("2 ") {
            // a line 2 with no line 1 before it
            report(&mut out, strict, start, TleErrorKind::Unexpected)?;
            i += 1;
            continue;
        } else {
            let name = first.strip_prefix("0 ").unwrap_or(first).trim().to_string();
            (name, i + 1)
        };
        let Some(&(n1, l1)) = lines.get(l1_idx) else {
            report(&mut out, strict, start, TleErrorKind::Truncated)?;
            break;
        };
        let Some(&(n2, l2)) = lines.get(l1_idx + 1) else {
            report(&mut out, strict, n1, TleErrorKind::Truncated)?;
            break;
        };
        let parsed = check_line(l1, '1')
            .map_err(|k| (n1, k))
            .and_then(|_| check_line(l2, '2').map_err(|k| (n2, k)))
            .and_then(|_| parse_line1(l1).map_err(|k| (n1, k)))
            .and_then(|(_, mut rec)| {
                parse_line2(l2, &mut rec).map_err(|k| (n2, k))?;
                Ok(rec)
            });
        match parsed {
            Ok(mut rec) => {
                rec.name = name;
                out.records.push(rec);
                i = l1_idx + 2;
            }
            Err((line, kind)) => {
                report(&mut out, strict, line, kind)?;
                // resynchronise on the next candidate group
                i = l1_idx + 2;
            }
        }
    }
    Ok(out)
}

fn report(out: &mut ParsedTle, strict: bool, line: usize, kind: TleErrorKind) -> Result<()> {
    if strict {
        return Err(Error::Tle { line, kind });
    }
    log::warn!("skipping TLE group at line {line}: {kind}");
    out.issues.push(TleIssue {
        line,
        message: kind.to_string(),
    });
    Ok(())
}

/// Julian date at 00:00 UTC of a Gregorian calendar date.
pub fn julian_date(year: i32, month: u32, day: u32) -> f64 {
    let (y, m) = if month <= 2 {
        (year - 1, month + 12)
    } else {
        (year, month)
    };
    let a = y.div_euclid(100);
    let b = 2 - a + a.div_euclid(4);
    (365.25 * (y + 4716) as f64).floor() + (30.6001 * (m + 1) as f64).floor() + day as f64 + b as f64 - 1524.5
}

/// Greenwich mean sidereal time in degrees, IAU 1982 polynomial.
pub fn gmst_deg(jd_ut1: f64) -> f64 {
    let t = (jd_ut1 - 2_451_545.0) / 36_525.0;
    let seconds =
        67_310.548_41 + (876_600.0 * 3_600.0 + 8_640_184.812_866) * t + 0.093_104 * t * t - 6.2e-6 * t * t * t;
    (seconds.rem_euclid(86_400.0) / 240.0).rem_euclid(360.0)
}

/// Sub-satellite east longitude in radians, `[0, 2 pi)`, from
/// `raan + arg_perigee + mean_anomaly - GMST(epoch)`.
pub fn subsatellite_longitude(rec: &TleRecord, max_inclination_deg: f64) -> Result<f64> {
    if !rec.is_near_geostationary(max_inclination_deg) {
        return Err(Error::domain(format!(
            "object {} is not near-geostationary (inclination {} deg, mean motion {} rev/day)",
            rec.catalog_number, rec.inclination_deg, rec.mean_motion
        )));
    }
    let sidereal = rec.raan_deg + rec.arg_perigee_deg + rec.mean_anomaly_deg;
    Ok((sidereal - gmst_deg(rec.epoch_jd())).rem_euclid(360.0).to_radians())
}

/// Longitudes of the near-geostationary part of a catalog, projected on the
/// ideal geostationary circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoSnapshot {
    pub longitudes: Vec<f64>,
    /// Records in the source catalog.
    pub source_count: usize,
    /// Inclination cut, degrees.
    pub max_inclination_deg: f64,
    /// Records under the inclination cut whose mean motion is not
    /// geostationary.
    pub rejected: usize,
}

impl GeoSnapshot {
    pub fn from_records(records: &[TleRecord], max_inclination_deg: f64) -> Self {
        let mut longitudes = Vec::new();
        let mut rejected = 0;
        for rec in records.iter().filter(|r| r.inclination_deg < max_inclination_deg) {
            match subsatellite_longitude(rec, max_inclination_deg) {
                Ok(l) => longitudes.push(l),
                Err(_) => {
                    log::warn!("dropping {}: mean motion {}", rec.catalog_number, rec.mean_motion);
                    rejected += 1;
                }
            }
        }
        Self {
            longitudes,
            source_count: records.len(),
            max_inclination_deg,
            rejected,
        }
    }

    pub fn len(&self) -> usize {
        self.longitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.longitudes.is_empty()
    }
}

/// Number of snapshot satellites above the horizon, averaged over terminal
/// longitudes 0, 1, ..., 359 degrees at latitude `phi`.
pub fn average_visible_count(snapshot: &GeoSnapshot, ctx: &GeometryContext, phi: f64) -> Result<f64> {
    if snapshot.is_empty() {
        return Err(Error::domain("snapshot holds no satellites"));
    }
    let positions: Vec<[f64; 3]> = snapshot.longitudes.iter().map(|&l| ctx.satellite_position(l)).collect();
    let total: usize = (0..360)
        .into_par_iter()
        .map(|deg| {
            let t = TerminalPosition::new(ctx, phi, f64::from(deg).to_radians())?;
            Ok(positions.iter().filter(|&&p| t.sees(p)).count())
        })
        .sum::<Result<usize>>()?;
    Ok(total as f64 / 360.0)
}

/// Downloads a TLE catalog as text.
#[cfg(feature = "fetch")]
pub fn fetch_catalog(url: &str) -> Result<String> {
    ureq::get(url)
        .call()
        .and_then(|mut r| r.body_mut().read_to_string())
        .map_err(|e| Error::io(url, std::io::Error::other(e)))
}

/// Settings for [`synthetic_catalog`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCatalog {
    pub seed: u64,
    /// Records with inclination below one degree.
    pub geostationary: usize,
    /// Geosynchronous records with inclination between 1 and 15 degrees.
    pub inclined: usize,
    pub epoch_year: i32,
    pub epoch_day: f64,
    /// Relative density of geostationary slots per 10-degree longitude bin,
    /// starting at 0 degrees east.
    pub longitude_weights: [f64; 36],
}

impl Default for SyntheticCatalog {
    fn default() -> Self {
        // Crowded over the Americas, Europe-Africa and Asia, sparse over the
        // central Pacific between 180 and 220 degrees east.
        let longitude_weights = [
            1.6, 1.4, 1.3, 1.2, 1.0, 1.3, 1.0, 1.0, 1.1, 1.2, // 0..100
            1.4, 1.5, 1.4, 1.3, 1.1, 1.0, 0.9, 0.6, // 100..180
            0.08, 0.05, 0.05, 0.08, // 180..220
            0.3, 0.5, 0.8, 1.0, 1.2, 1.2, 1.1, 1.0, 1.0, 1.0, 1.1, 1.0, 1.1, 1.4, // 220..360
        ];
        Self {
            seed: 20_231_021,
            geostationary: 391,
            inclined: 140,
            epoch_year: 2023,
            epoch_day: 294.0,
            longitude_weights,
        }
    }
}

/// A reproducible catalog of geosynchronous objects with a realistic
/// longitude layout, in 3-line TLE form.
pub fn synthetic_catalog(spec: &SyntheticCatalog) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total_weight: f64 = spec.longitude_weights.iter().sum();
    let mut out = String::new();
    let count = spec.geostationary + spec.inclined;
    for k in 0..count {
        let geo = k < spec.geostationary;
        let longitude = if geo {
            let mut u = rng.random::<f64>() * total_weight;
            let mut bin = 0;
            while bin < 35 && u >= spec.longitude_weights[bin] {
                u -= spec.longitude_weights[bin];
                bin += 1;
            }
            10.0 * (bin as f64 + rng.random::<f64>())
        } else {
            rng.random::<f64>() * 360.0
        };
        let epoch_day = spec.epoch_day + 0.05 + 0.9 * rng.random::<f64>();
        let rec_epoch = TleRecord {
            epoch_year: spec.epoch_year,
            epoch_day: (epoch_day * 1e8).round() / 1e8,
            ..blank_record()
        };
        let gmst = gmst_deg(rec_epoch.epoch_jd());
        let inclination = if geo {
            0.01 + 0.97 * rng.random::<f64>()
        } else {
            1.2 + 13.0 * rng.random::<f64>()
        };
        let raan = rng.random::<f64>() * 360.0;
        let argp = rng.random::<f64>() * 360.0;
        let mean_anomaly = (longitude + gmst - raan - argp).rem_euclid(360.0);
        let rec = TleRecord {
            name: format!("SYNTH GEO {:03}", k + 1),
            catalog_number: 90_000 + k as u32,
            classification: 'U',
            intl_designator: format!("{:02}{:03}A", 90 + (k / 500), k % 500 + 1),
            mean_motion_dot: -(rng.random::<f64>() * 300.0).round() * 1e-8,
            bstar: 0.0,
            element_set: 999,
            inclination_deg: round4(inclination),
            raan_deg: round4(raan),
            eccentricity: ((1e-4 + 4e-4 * rng.random::<f64>()) * 1e7).round() / 1e7,
            arg_perigee_deg: round4(argp),
            mean_anomaly_deg: round4(mean_anomaly),
            mean_motion: ((1.00271 + 2e-5 * (rng.random::<f64>() - 0.5)) * 1e8).round() / 1e8,
            revolution_number: rng.random_range(100..9000),
            ..rec_epoch
        };
        let (l1, l2) = rec.to_lines();
        let _ = writeln!(out, "{}\n{l1}\n{l2}", rec.name);
    }
    out
}

fn round4(x: f64) -> f64 {
    ((x * 1e4).round() / 1e4).rem_euclid(360.0)
}

fn blank_record() -> TleRecord {
    TleRecord {
        name: String::new(),
        catalog_number: 0,
        classification: 'U',
        intl_designator: String::new(),
        epoch_year: 2000,
        epoch_day: 1.0,
        mean_motion_dot: 0.0,
        mean_motion_ddot: 0.0,
        bstar: 0.0,
        ephemeris_type: 0,
        element_set: 0,
        inclination_deg: 0.0,
        raan_deg: 0.0,
        eccentricity: 0.0,
        arg_perigee_deg: 0.0,
        mean_anomaly_deg: 0.0,
        mean_motion: GEO_MEAN_MOTION,
        revolution_number: 0,
    }
}
