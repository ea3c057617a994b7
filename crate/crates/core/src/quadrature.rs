//! Globally adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |value|)`. Error estimates use
//! the usual QUADPACK rescaling of `|K - G|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and panel rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Kronrod nodes per panel: 15 or 21.
    pub nodes_per_panel: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            nodes_per_panel: 15,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        rule(self.nodes_per_panel).map(|_| ())
    }

    /// Same rule with both tolerances divided by `factor`, for integrals
    /// nested inside another one.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }
}

/// Value and error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Rule {
    /// Kronrod abscissae on [0, 1], descending, centre last.
    xgk: &'static [f64],
    wgk: &'static [f64],
    /// Gauss weights for the abscissae at odd positions of `xgk` (plus the
    /// centre for odd Gauss orders).
    wg: &'static [f64],
}

#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_687_977_908_287,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

static K15: Rule = Rule {
    xgk: &XGK15,
    wgk: &WGK15,
    wg: &WG7,
};
static K21: Rule = Rule {
    xgk: &XGK21,
    wgk: &WGK21,
    wg: &WG10,
};

fn rule(nodes: usize) -> Result<&'static Rule> {
    match nodes {
        15 => Ok(&K15),
        21 => Ok(&K21),
        other => Err(Error::Config(format!("nodes_per_panel must be 15 or 21, got {other}"))),
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn kronrod_panel<F>(rule: &Rule, f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let n = rule.xgk.len();
    let gauss_has_centre = rule.wg.len() * 2 > n - 1;

    let fc = f(centre)?;
    let mut res_k = fc * rule.wgk[n - 1];
    let mut res_g = if gauss_has_centre {
        fc * rule.wg[rule.wg.len() - 1]
    } else {
        0.0
    };
    let mut resabs = res_k.abs();
    let mut values = Vec::with_capacity(2 * n);
    for j in 0..n - 1 {
        let dx = half * rule.xgk[j];
        let f1 = f(centre - dx)?;
        let f2 = f(centre + dx)?;
        values.push((f1, f2));
        res_k += rule.wgk[j] * (f1 + f2);
        resabs += rule.wgk[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += rule.wg[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut resasc = rule.wgk[n - 1] * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        resasc += rule.wgk[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, resabs * half.abs(), resasc * half.abs());
    if !value.is_finite() {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
    })
}

/// Integrates a fallible integrand over `[a, b]`.
///
/// Errors from the integrand propagate unchanged; running out of
/// subdivisions yields [`Error::Convergence`] carrying the best estimate.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let rule = rule(spec.nodes_per_panel)?;
    let per_panel = 2 * rule.xgk.len() - 1;

    let mut panels = vec![kronrod_panel(rule, &mut f, a, b)?];
    let mut evaluations = per_panel;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if panels.len() > spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: value,
                error_estimate: error,
                subdivisions: panels.len() - 1,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // panel can no longer be split in floating point
            return Err(Error::Convergence {
                estimate: value,
                error_estimate: error,
                subdivisions: panels.len(),
            });
        }
        panels.push(kronrod_panel(rule, &mut f, p.a, mid)?);
        panels.push(kronrod_panel(rule, &mut f, mid, p.b)?);
        evaluations += 2 * per_panel;
    }
}

/// Integrates an infallible integrand over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        for nodes in [15, 21] {
            let spec = QuadratureSpec {
                nodes_per_panel: nodes,
                ..Default::default()
            };
            let got = integrate(|x| 7.0 * x.powi(6) - 3.0 * x * x + 1.0, -1.0, 2.0, &spec).unwrap();
            // [x^7 - x^3 + x] from -1 to 2
            let exact = (128.0 - 8.0 + 2.0) - (-1.0 + 1.0 - 1.0);
            assert!((got.value - exact).abs() < 1e-12, "{nodes}: {}", got.value);
            assert_eq!(got.evaluations, nodes);
        }
    }

    #[test]
    fn smooth_transcendental() {
        let spec = QuadratureSpec::default();
        let got = integrate(f64::sin, 0.0, PI, &spec).unwrap();
        assert!((got.value - 2.0).abs() < 1e-13);
        let got = integrate(|x| (-x * x).exp(), -6.0, 6.0, &spec).unwrap();
        assert!((got.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_needs_subdivision() {
        let spec = QuadratureSpec::default();
        let n = 400.0;
        let got = integrate(|x| n * (1.0 - x).powf(n - 1.0), 0.0, 1.0, &spec).unwrap();
        assert!((got.value - 1.0).abs() < 1e-8);
        assert!(got.evaluations > 29);
    }

    #[test]
    fn reports_non_convergence_with_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            rel_tol: 1e-14,
            abs_tol: 1e-15,
            ..Default::default()
        };
        let err = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap_err();
        match err {
            Error::Convergence { estimate, .. } => assert!((estimate - 2.0).abs() < 0.2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        let spec = QuadratureSpec {
            nodes_per_panel: 14,
            ..Default::default()
        };
        assert!(matches!(integrate(|x| x, 0.0, 1.0, &spec), Err(Error::Config(_))));
        let spec = QuadratureSpec {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let spec = QuadratureSpec::default();
        let fwd = integrate(f64::exp, 0.0, 1.0, &spec).unwrap().value;
        let rev = integrate(f64::exp, 1.0, 0.0, &spec).unwrap().value;
        assert!((fwd + rev).abs() < 1e-14);
    }

    #[test]
    fn integrand_errors_propagate() {
        let spec = QuadratureSpec::default();
        let res = try_integrate(|_| Err(Error::domain("boom")), 0.0, 1.0, &spec);
        assert!(matches!(res, Err(Error::Domain(_))));
    }
}
