//! Adaptive Gauss–Kronrod quadrature and principal-value integrals.
//!
//! Principal values are taken by folding a symmetric window around the pole,
//! `PV ∫_{p-h}^{p+h} f(x)/(x-p) dx = ∫_0^h (f(p+u) - f(p-u))/u du`, which is a
//! regular integral; the rest of the domain is integrated directly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerances and geometry for every quadrature in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PvQuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-width of the folded window around a pole, as a fraction of the
    /// pole position. Shrunk to half the distance to the nearest endpoint.
    pub pole_window: f64,
    pub max_subdivisions: usize,
    /// Infinite-range Hilbert integrals are truncated at `±W·ω₀` around the
    /// pole, with the analytic tail of a frozen-J integrand added, so a few
    /// oscillation periods are enough.
    pub hilbert_half_width: f64,
}

impl Default for PvQuadratureConfig {
    fn default() -> Self {
        PvQuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            pole_window: 0.1,
            max_subdivisions: 4000,
            hilbert_half_width: 5.0,
        }
    }
}

impl PvQuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature", "tolerances must be > 0"));
        }
        if !(self.pole_window > 0.0) || !(self.hilbert_half_width > 0.0) {
            return Err(Error::invalid("quadrature", "window sizes must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("quadrature.max_subdivisions", "must be > 0"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::ops::Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, c: f64) -> Estimate {
        Estimate {
            value: self.value * c,
            error: self.error * c.abs(),
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_453,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// 10-point Gauss weights, paired with XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// One 21-point Kronrod panel with QUADPACK's error heuristic.
fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hl = half.abs();
    let resasc = resasc * hl;
    let resabs = resabs * hl;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Estimate {
        value: resk * half,
        error: err,
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &PvQuadratureConfig) -> Result<Estimate> {
    integrate_pieces(f, &[a, b], cfg)
}

/// Adaptive integration starting from the given panel boundaries, which must
/// be monotone. Useful when the integrand oscillates on a known scale.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &PvQuadratureConfig,
) -> Result<Estimate> {
    if breaks.len() < 2 {
        return Ok(Estimate::default());
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut total = Estimate::default();
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let est = kronrod21(&f, w[0], w[1]);
        total = total + est;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            est,
        });
    }
    let mut subdivisions = heap.len();
    while total.error > cfg.target(total.value) {
        if !total.value.is_finite() {
            return Err(Error::Domain("integrand is not finite".into()));
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                achieved: total.error,
                requested: cfg.target(total.value),
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split any further in floating point.
            return Err(Error::Quadrature {
                achieved: total.error,
                requested: cfg.target(total.value),
                subdivisions,
            });
        }
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
        subdivisions += 1;
    }
    // Re-sum to shed the drift of the running update.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    Ok(Estimate { value, error })
}

/// Uniform breakpoints with at most `max_width` between them.
pub(crate) fn breakpoints(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let n = if max_width.is_finite() && max_width > 0.0 {
        (((b - a).abs() / max_width).ceil() as usize).clamp(1, 100_000)
    } else {
        1
    };
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `PV ∫_a^b f(x) / (x - pole) dx`.
///
/// `max_width` bounds the initial panel width (pass `f64::INFINITY` for a
/// smooth `f`).
pub fn principal_value<F: Fn(f64) -> f64>(
    f: F,
    pole: f64,
    a: f64,
    b: f64,
    max_width: f64,
    cfg: &PvQuadratureConfig,
) -> Result<Estimate> {
    if !(b > a) {
        return Ok(Estimate::default());
    }
    if pole == a || pole == b {
        return Err(Error::Domain(format!(
            "pole at {pole} coincides with an integration endpoint; the principal value diverges"
        )));
    }
    if pole < a || pole > b {
        return integrate_pieces(|x| f(x) / (x - pole), &breakpoints(a, b, max_width), cfg);
    }
    let h = (cfg.pole_window * pole.abs())
        .min(0.5 * (pole - a))
        .min(0.5 * (b - pole));
    let h = if h > 0.0 { h } else { 0.5 * (pole - a).min(b - pole) };
    let left = integrate_pieces(
        |x| f(x) / (x - pole),
        &breakpoints(a, pole - h, max_width),
        cfg,
    )?;
    let right = integrate_pieces(
        |x| f(x) / (x - pole),
        &breakpoints(pole + h, b, max_width),
        cfg,
    )?;
    let window = integrate_pieces(
        |u| (f(pole + u) - f(pole - u)) / u,
        &breakpoints(0.0, h, max_width),
        cfg,
    )?;
    Ok(left + right + window)
}

/// Folded form of `PV ∫_{p-L}^{p+L} f(x)/(x-p) dx`.
pub fn principal_value_symmetric<F: Fn(f64) -> f64>(
    f: F,
    pole: f64,
    half_width: f64,
    max_width: f64,
    cfg: &PvQuadratureConfig,
) -> Result<Estimate> {
    integrate_pieces(
        |u| (f(pole + u) - f(pole - u)) / u,
        &breakpoints(0.0, half_width, max_width),
        cfg,
    )
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return FRAC_PI_2;
    }
    if x < 2.0 {
        // Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
        let mut sum = 0.0;
        let mut power = x; // x^{2k+1}/(2k+1)!
        let mut k = 0usize;
        loop {
            let term = power / (2 * k + 1) as f64;
            sum += if k.is_multiple_of(2) { term } else { -term };
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            k += 1;
            power *= x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
        }
        sum
    } else {
        // Continued fraction for E1(ix) by modified Lentz.
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 1..1000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        FRAC_PI_2 + h.im
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PvQuadratureConfig {
        PvQuadratureConfig::default()
    }

    #[test]
    fn integrates_polynomial_exactly() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn integrates_oscillatory_function() {
        let r = integrate_pieces(|x| (40.0 * x).cos(), &breakpoints(0.0, 10.0, 0.1), &cfg()).unwrap();
        assert!((r.value - (400f64).sin() / 40.0).abs() < 1e-10);
    }

    #[test]
    fn reports_nonconvergence() {
        let tight = PvQuadratureConfig {
            max_subdivisions: 3,
            ..cfg()
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &tight).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn principal_value_of_reciprocal() {
        // PV ∫_0^3 dx/(x-1) = ln 2
        let r = principal_value(|_| 1.0, 1.0, 0.0, 3.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn principal_value_with_smooth_numerator() {
        // PV ∫_0^2 x²/(x-1) dx = ∫ (x+1) dx + PV ∫ dx/(x-1) = 4 + 0
        let r = principal_value(|x| x * x, 1.0, 0.0, 2.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pole_outside_interval_is_ordinary() {
        let r = principal_value(|_| 1.0, -1.0, 0.0, 1.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pole_on_endpoint_is_rejected() {
        assert!(principal_value(|_| 1.0, 0.0, 0.0, 1.0, f64::INFINITY, &cfg()).is_err());
    }

    #[test]
    fn sine_integral_reference_values() {
        // Abramowitz & Stegun table 5.1
        assert!((sine_integral(1.0) - 0.946_083_070_367_183).abs() < 1e-15);
        assert!((sine_integral(2.0) - 1.605_412_976_802_695).abs() < 1e-14);
        assert!((sine_integral(10.0) - 1.658_347_594_218_874).abs() < 1e-14);
        assert!((sine_integral(-3.0) + 1.848_652_527_999_468_3).abs() < 1e-14);
        assert!((sine_integral(1e6) - FRAC_PI_2).abs() < 2e-6);
    }

    #[test]
    fn sine_integral_matches_quadrature() {
        for &x in &[0.3, 1.9, 2.1, 7.5, 33.0] {
            let q = integrate_pieces(
                |t| if t == 0.0 { 1.0 } else { t.sin() / t },
                &breakpoints(0.0, x, 1.0),
                &PvQuadratureConfig {
                    abs_tol: 1e-13,
                    rel_tol: 1e-13,
                    ..cfg()
                },
            )
            .unwrap();
            assert!((q.value - sine_integral(x)).abs() < 1e-12, "x = {x}");
        }
    }
}
