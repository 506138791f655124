//! Adaptive 21-point Gauss–Kronrod quadrature over a set of seed panels.
//!
//! Callers supply breakpoints that already separate the length scales of the
//! integrand (for the Lifshitz integrals: the scale `ζ` near the lower limit
//! and the unit scale of `e^{−y}`), so most panels converge on the first
//! Kronrod evaluation. Panels whose error estimate is too large are bisected,
//! worst first.

use thiserror::Error;

const XGK: [f64; 11] = [
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
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_005_978_214,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge: estimate {value:e}, error {abs_error:e}, requested {requested:e}")]
    NoConvergence {
        value: f64,
        abs_error: f64,
        requested: f64,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
}

/// Result of a quadrature with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Error targets: converged when `abs_error ≤ max(abs_tol, rel_tol · |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol,
            max_panels: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Roundoff part of `error`; bisecting cannot reduce it.
    floor: f64,
}

/// QUADPACK error rescaling; returns `(error, roundoff floor)`.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> (f64, f64) {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let mut floor = 0.0;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        floor = 50.0 * f64::EPSILON * res_abs;
        scaled = scaled.max(floor);
    }
    (scaled, floor)
}

/// Single 21-point Kronrod evaluation on `[lo, hi]`.
fn kronrod21<F>(f: &F, lo: f64, hi: f64) -> Result<Panel, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let f_center = eval(center)?;
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let (error, floor) = rescale_error(
        (res_kronrod - res_gauss) * half,
        res_abs * scale,
        res_asc * scale,
    );
    Ok(Panel {
        lo,
        hi,
        value: res_kronrod * half,
        error,
        floor,
    })
}

/// Integrate `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// Breakpoints must be strictly increasing and finite. Each seed panel is
/// evaluated once; the panel with the largest error is then bisected until
/// the total error estimate meets `tol`. Requests below the roundoff floor
/// stop once only roundoff error is left; the reported error includes it.
pub fn integrate<F>(f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if breakpoints.len() < 2 {
        return Err(QuadratureError::InvalidBreakpoints(
            "need at least two points".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || !breakpoints.iter().all(|b| b.is_finite())
    {
        return Err(QuadratureError::InvalidBreakpoints(format!(
            "not strictly increasing and finite: {breakpoints:?}"
        )));
    }

    let mut panels = Vec::with_capacity(breakpoints.len() * 2);
    for w in breakpoints.windows(2) {
        panels.push(kronrod21(&f, w[0], w[1])?);
    }
    let mut evaluations = 21 * panels.len();

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let reducible: f64 = panels.iter().map(|p| p.error - p.floor).sum();
        let requested = tol.abs_tol.max(tol.rel_tol * value.abs());
        if error <= requested || reducible <= requested {
            return Ok(Estimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if panels.len() >= tol.max_panels {
            return Err(QuadratureError::NoConvergence {
                value,
                abs_error: error,
                requested,
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1.error - a.1.floor).total_cmp(&(b.1.error - b.1.floor)))
            .expect("at least one panel");
        let p = panels[worst];
        let mid = 0.5 * (p.lo + p.hi);
        if !(p.lo < mid && mid < p.hi) {
            // Panel can no longer be split in floating point.
            return Err(QuadratureError::NoConvergence {
                value,
                abs_error: error,
                requested,
            });
        }
        let left = kronrod21(&f, p.lo, mid)?;
        let right = kronrod21(&f, mid, p.hi)?;
        evaluations += 42;
        panels[worst] = left;
        panels.push(right);
    }
}
