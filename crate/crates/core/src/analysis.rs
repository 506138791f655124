//! Fits over computed curves: power-law exponents, the `T → 0` entropy
//! intercept, and exact-versus-asymptotic comparison tables.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::asymptotics::{low_t_pair, AsymptoticError, Quantity, StaticPair};
use crate::constants::K_B;
use crate::lifshitz::{
    entropy, pressure_thermal_correction, thermal_correction, Evaluated, LifshitzError, NumericalSettings,
    PlateConfiguration,
};
use crate::materials::PermittivityModel;
use crate::reflection::{zero_freq_pair, ReflectionError, TeZero};
use crate::specfun::{polylog_with, PrecisionPolicy, SpecFunError};

/// Default temperature ladder for [`nernst_check`], in kelvin.
pub const DEFAULT_LADDER: [f64; 5] = [8.0, 4.0, 2.0, 1.0, 0.5];

/// Default bound on the rms fit residual relative to the largest `|S|`.
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("fit input must be finite and positive where logarithms are taken: {0}")]
    InvalidData(String),
    #[error("ladder-unconverged: rms residual {residual:e} exceeds {tolerance:e} of the largest entropy")]
    LadderUnconverged { residual: f64, tolerance: f64 },
    #[error("temperature ladder must be strictly decreasing and positive")]
    InvalidLadder,
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

impl AnalysisError {
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            AnalysisError::LadderUnconverged { .. } => true,
            AnalysisError::Lifshitz(e) => e.is_convergence_failure(),
            _ => false,
        }
    }
}

/// Least-squares line through `(ln x, ln |y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (zero for two points).
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LogLogFit, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::InvalidData(format!("{} x values, {} y values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(AnalysisError::TooFewPoints { needed: 2, got: x.len() });
    }
    if x.iter().any(|v| !(*v > 0.0 && v.is_finite())) || y.iter().any(|v| !(v.abs() > 0.0 && v.is_finite())) {
        return Err(AnalysisError::InvalidData("x must be positive and y nonzero".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::InvalidData("all x values equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if lx.len() > 2 {
        let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LogLogFit {
        slope,
        intercept,
        slope_stderr,
        points: lx.len(),
    })
}

/// Least-squares fit `S = s₀ + s₂τ² + s₃τ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyFit {
    pub s0: f64,
    /// One standard deviation of `s₀`, combining the fit scatter with the
    /// reported errors of the points.
    pub s0_uncertainty: f64,
    pub s2: f64,
    pub s3: f64,
    pub rms_residual: f64,
}

/// Fits [`EntropyFit`] to at least four points.
///
/// Unweighted: at these temperatures the unmodelled `τ⁴` term, not the point
/// errors, dominates the scatter. The covariance uses
/// `σ² = RSS/(n − 3) + mean(errors²)`.
pub fn fit_entropy_intercept(taus: &[f64], s: &[f64], errors: &[f64]) -> Result<EntropyFit, AnalysisError> {
    let n = taus.len();
    if s.len() != n || errors.len() != n {
        return Err(AnalysisError::InvalidData("length mismatch".into()));
    }
    if n < 4 {
        return Err(AnalysisError::TooFewPoints { needed: 4, got: n });
    }
    if taus.iter().chain(s).chain(errors).any(|v| !v.is_finite()) || taus.iter().any(|t| *t <= 0.0) {
        return Err(AnalysisError::InvalidData("non-finite value or nonpositive tau".into()));
    }
    // Columns scaled to O(1) for conditioning.
    let tmax = taus.iter().cloned().fold(0.0, f64::max);
    let smax = s.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let rows: Vec<[f64; 3]> = taus
        .iter()
        .map(|t| {
            let u = t / tmax;
            [1.0, u * u, u * u * u]
        })
        .collect();
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (r, v) in rows.iter().zip(s) {
        for i in 0..3 {
            atb[i] += r[i] * v / smax;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let inv = invert3(&ata).ok_or_else(|| AnalysisError::InvalidData("degenerate tau values".into()))?;
    let coef: Vec<f64> = (0..3).map(|i| (0..3).map(|j| inv[i][j] * atb[j]).sum::<f64>() * smax).collect();
    let rss: f64 = rows
        .iter()
        .zip(s)
        .map(|(r, v)| (v - (coef[0] * r[0] + coef[1] * r[1] + coef[2] * r[2])).powi(2))
        .sum();
    let mean_err2 = errors.iter().map(|e| e * e).sum::<f64>() / n as f64;
    let sigma2 = rss / (n - 3) as f64 + mean_err2;
    Ok(EntropyFit {
        s0: coef[0],
        s0_uncertainty: (sigma2 * inv[0][0]).sqrt(),
        s2: coef[1] / tmax.powi(2),
        s3: coef[2] / tmax.powi(3),
        rms_residual: (rss / n as f64).sqrt(),
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = c(j, i) / det;
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `|s₀| ≤ 3σ`.
    Pass,
    /// `s₀ > 3σ`.
    Violation,
    /// `s₀ < −3σ`: negative entropy at `T = 0`, which no model here produces.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub temperature: f64,
    pub tau: f64,
    pub entropy: Evaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NernstReport {
    pub separation: f64,
    pub ladder: Vec<LadderPoint>,
    pub fit: EntropyFit,
    pub verdict: Verdict,
    pub all_positive: bool,
    /// `T → 0` entropy expected from the dc conductivity, when a plate has one.
    pub expected_s0: Option<f64>,
    /// `s₀/expected − 1`.
    pub relative_to_expected: Option<f64>,
}

/// `S(T → 0)` implied by the zero-frequency jump of dc-conducting plates:
/// `(k_B/16πa²) Σ_pol [Li₃(R) − Li₃(R_frozen)]`, where `R_frozen` uses the
/// plates without their conductivity. `None` when no plate is dc-augmented
/// or a plate is a plasma metal.
pub fn expected_entropy_residual(
    m1: &PermittivityModel,
    m2: &PermittivityModel,
    separation: f64,
) -> Result<Option<f64>, AnalysisError> {
    let freeze = |m: &PermittivityModel| match m {
        PermittivityModel::DcAugmented(d) => PermittivityModel::Oscillator(d.base().clone()),
        other => other.clone(),
    };
    let any_dc = [m1, m2].iter().any(|m| matches!(m, PermittivityModel::DcAugmented(_)));
    let any_plasma = [m1, m2].iter().any(|m| matches!(m, PermittivityModel::Plasma(_)));
    if !any_dc || any_plasma {
        return Ok(None);
    }
    let products = |a: &PermittivityModel, b: &PermittivityModel| -> Result<(f64, f64), AnalysisError> {
        let (pa, pb) = (zero_freq_pair(a, None)?, zero_freq_pair(b, None)?);
        let te = |p: &TeZero| match p {
            TeZero::Constant(v) => *v,
            TeZero::Plasma { .. } => unreachable!("plasma excluded above"),
        };
        Ok((pa.r_par0 * pb.r_par0, te(&pa.r_perp0) * te(&pb.r_perp0)))
    };
    let tight = PrecisionPolicy::tight();
    let li3 = |z: f64| polylog_with(3, z, &tight);
    let (tm, te) = products(m1, m2)?;
    let (ftm, fte) = products(&freeze(m1), &freeze(m2))?;
    let jump = (li3(tm)? - li3(ftm)?) + (li3(te)? - li3(fte)?);
    Ok(Some(K_B / (16.0 * PI * separation * separation) * jump))
}

/// Entropy on a decreasing temperature ladder, extrapolated to `T = 0`.
pub fn nernst_check(
    m1: &PermittivityModel,
    m2: &PermittivityModel,
    separation: f64,
    ladder: &[f64],
    ns: &NumericalSettings,
    residual_tolerance: f64,
) -> Result<NernstReport, AnalysisError> {
    if ladder.iter().any(|t| !(*t > 0.0 && t.is_finite())) || ladder.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(AnalysisError::InvalidLadder);
    }
    let base = PlateConfiguration::new(m1.clone(), m2.clone(), separation, ladder.first().copied().unwrap_or(1.0))?;
    let mut points = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let cfg = base.with_temperature(t);
        points.push(LadderPoint {
            temperature: t,
            tau: cfg.tau(),
            entropy: entropy(&cfg, ns)?,
        });
    }
    let taus: Vec<f64> = points.iter().map(|p| p.tau).collect();
    let s: Vec<f64> = points.iter().map(|p| p.entropy.value).collect();
    let e: Vec<f64> = points.iter().map(|p| p.entropy.error).collect();
    let fit = fit_entropy_intercept(&taus, &s, &e)?;
    let smax = s.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if fit.rms_residual > residual_tolerance * smax {
        return Err(AnalysisError::LadderUnconverged {
            residual: fit.rms_residual,
            tolerance: residual_tolerance,
        });
    }
    let bound = 3.0 * fit.s0_uncertainty;
    let verdict = if fit.s0.abs() <= bound {
        Verdict::Pass
    } else if fit.s0 > 0.0 {
        Verdict::Violation
    } else {
        Verdict::Inconclusive
    };
    let expected_s0 = expected_entropy_residual(m1, m2, separation)?;
    Ok(NernstReport {
        separation,
        all_positive: s.iter().all(|v| *v > 0.0),
        relative_to_expected: expected_s0.filter(|v| *v != 0.0).map(|v| fit.s0 / v - 1.0),
        expected_s0,
        ladder: points,
        fit,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: Quantity,
    pub temperature: f64,
    pub tau: f64,
    pub exact: Evaluated,
    pub asymptotic: f64,
    /// `asymptotic/exact − 1`.
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub pair: StaticPair,
    pub rows: Vec<ComparisonRow>,
    /// Exponent of `|ΔF|` over the smallest decade of `τ`.
    pub free_energy_slope: Option<LogLogFit>,
    /// Exponent of `|ΔP|` over the smallest decade of `τ`.
    pub pressure_slope: Option<LogLogFit>,
}

/// Closed-form class for comparisons; conducting plates have no low-`τ` form.
pub fn comparison_pair(m1: &PermittivityModel, m2: &PermittivityModel) -> Result<StaticPair, AnalysisError> {
    StaticPair::from_models(m1, m2)
        .filter(|p| *p != StaticPair::ConductingPlates)
        .ok_or_else(|| {
            AsymptoticError::NotApplicable(format!("low-temperature behaviour of {} / {}", m1.kind(), m2.kind())).into()
        })
}

/// Exact thermal correction of `quantity` at `cfg` against its low-`τ` expansion.
pub fn compare_point(
    pair: StaticPair,
    cfg: &PlateConfiguration,
    quantity: Quantity,
    ns: &NumericalSettings,
) -> Result<ComparisonRow, AnalysisError> {
    let exact = match quantity {
        Quantity::FreeEnergy => thermal_correction(cfg, ns)?.value,
        Quantity::Pressure => pressure_thermal_correction(cfg, ns)?.value,
        Quantity::Entropy => entropy(cfg, ns)?,
    };
    let asymptotic = low_t_pair(pair, cfg.separation, cfg.temperature, quantity)?.value;
    Ok(ComparisonRow {
        quantity,
        temperature: cfg.temperature,
        tau: cfg.tau(),
        exact,
        asymptotic,
        rel_diff: asymptotic / exact.value - 1.0,
    })
}

/// Log–log slope of `|exact|` for `quantity` over rows with `τ` within a
/// factor of ten of the smallest; `None` with fewer than two such rows.
pub fn smallest_decade_slope(rows: &[ComparisonRow], quantity: Quantity) -> Option<LogLogFit> {
    let selected: Vec<&ComparisonRow> = rows.iter().filter(|r| r.quantity == quantity).collect();
    let tmin = selected.iter().map(|r| r.tau).fold(f64::INFINITY, f64::min);
    let (x, y): (Vec<f64>, Vec<f64>) = selected
        .iter()
        .filter(|r| r.tau <= 10.0 * tmin * (1.0 + 1e-12))
        .map(|r| (r.tau, r.exact.value))
        .unzip();
    loglog_slope(&x, &y).ok()
}

/// Exact thermal corrections `ΔF`, `ΔP` against their low-`τ` expansions,
/// in the given temperature order.
pub fn compare_asymptotic(
    m1: &PermittivityModel,
    m2: &PermittivityModel,
    separation: f64,
    temperatures: &[f64],
    ns: &NumericalSettings,
) -> Result<Comparison, AnalysisError> {
    let pair = comparison_pair(m1, m2)?;
    let base = PlateConfiguration::new(m1.clone(), m2.clone(), separation, 0.0)?;
    let mut rows = Vec::with_capacity(2 * temperatures.len());
    for &t in temperatures {
        let cfg = base.with_temperature(t);
        for quantity in [Quantity::FreeEnergy, Quantity::Pressure] {
            rows.push(compare_point(pair, &cfg, quantity, ns)?);
        }
    }
    Ok(Comparison {
        pair,
        free_energy_slope: smallest_decade_slope(&rows, Quantity::FreeEnergy),
        pressure_slope: smallest_decade_slope(&rows, Quantity::Pressure),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::preset;

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 / 5.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| -7.0 * v.powi(3)).collect();
        let fit = loglog_slope(&x, &y).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-10);
        assert!(fit.slope_stderr < 1e-10);
        assert!(loglog_slope(&x[..1], &y[..1]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn entropy_fit_recovers_polynomial() {
        let taus = [0.04, 0.02, 0.01, 0.005, 0.0025];
        let s: Vec<f64> = taus.iter().map(|t| 3e-14 + 2e-13 * t * t - 5e-13 * t * t * t).collect();
        let fit = fit_entropy_intercept(&taus, &s, &[0.0; 5]).unwrap();
        assert!((fit.s0 / 3e-14 - 1.0).abs() < 1e-9);
        assert!((fit.s2 / 2e-13 - 1.0).abs() < 1e-6);
        assert!((fit.s3 / -5e-13 - 1.0).abs() < 1e-5);
        assert!(fit.s0_uncertainty < 1e-22);
    }

    #[test]
    fn entropy_fit_uncertainty_covers_point_errors() {
        let taus = [0.04, 0.02, 0.01, 0.005];
        let s: Vec<f64> = taus.iter().map(|t| t * t).collect();
        let fit = fit_entropy_intercept(&taus, &s, &[1e-6; 4]).unwrap();
        assert!(fit.s0.abs() < 1e-15);
        assert!(fit.s0_uncertainty > 5e-7 && fit.s0_uncertainty < 1e-5);
        assert!(fit_entropy_intercept(&taus[..3], &s[..3], &[0.0; 3]).is_err());
        assert!(fit_entropy_intercept(&[0.1, 0.1, 0.1, 0.1], &[1.0; 4], &[0.0; 4]).is_err());
    }

    #[test]
    fn expected_residuals() {
        let a = 1e-6;
        let si = preset("Si-static").unwrap();
        let dc = preset("Si-dc").unwrap();
        let im = PermittivityModel::IdealMetal;
        assert_eq!(expected_entropy_residual(&si, &si, a).unwrap(), None);
        let dd = expected_entropy_residual(&dc, &dc, a).unwrap().unwrap();
        assert!((dd / 1.126_873_160_448_221_7e-13 - 1.0).abs() < 1e-12);
        let md = expected_entropy_residual(&im, &dc, a).unwrap().unwrap();
        assert!((md / 6.428_693_745_570_609e-14 - 1.0).abs() < 1e-12);
        let au = preset("Au-plasma").unwrap();
        assert_eq!(expected_entropy_residual(&au, &dc, a).unwrap(), None);
    }

    #[test]
    fn ladder_validation() {
        let si = preset("Si-static").unwrap();
        let ns = NumericalSettings::default();
        for bad in [&[1.0, 2.0, 0.5][..], &[2.0, 1.0, 0.0, -1.0][..]] {
            assert!(matches!(
                nernst_check(&si, &si, 1e-6, bad, &ns, 1e-2),
                Err(AnalysisError::InvalidLadder)
            ));
        }
    }

    #[test]
    fn comparison_rejects_conducting_plates() {
        let dc = preset("Si-dc").unwrap();
        let r = compare_asymptotic(&dc, &dc, 1e-6, &[1.0, 2.0], &NumericalSettings::default());
        assert!(matches!(r, Err(AnalysisError::Asymptotic(AsymptoticError::NotApplicable(_)))));
    }
}
