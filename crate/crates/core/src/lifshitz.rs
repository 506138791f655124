//! Matsubara-sum free energy and pressure between two semispaces, the
//! zero-temperature energy and pressure, and temperature derivatives.
//!
//! Internally everything is dimensionless: `τ = 4πk_B aT/(ħc)`,
//! `ζ_l = τl`, `y ≥ ζ`. With `Σ'` the Matsubara sum with half weight at
//! `l = 0`,
//!
//! ```text
//! F = (ħcτ/32π²a³) Σ' ∫_{ζ_l}^∞ y [ln(1 − R_tm e^{−y}) + ln(1 − R_te e^{−y})] dy
//! P = −(ħcτ/32π²a⁴) Σ' ∫_{ζ_l}^∞ y² [R_tm/(e^y − R_tm) + R_te/(e^y − R_te)] dy
//! ```
//!
//! where `R = r⁽¹⁾r⁽²⁾` for each polarization.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constants::{C, HBAR, K_B};
use crate::materials::{eps_at_matsubara, eval_eps, MaterialError, PermittivityModel};
use crate::numdiff::{central_derivative, DiffError, DiffOptions};
use crate::quadrature::{integrate, Estimate, QuadratureError, Tolerance};
use crate::reflection::{coefficients, zero_freq_pair, ReflectionError, ZeroFreqPair};
use crate::specfun::{polylog_with, PrecisionPolicy, SpecFunError};

/// Matsubara terms evaluated per parallel batch. Fixed so that the set of
/// evaluated terms does not depend on the thread count.
const CHUNK: u64 = 32;

/// Below this `τ` the sum is replaced by the zero-temperature integral.
pub const TAU_ZERO_ROUTE: f64 = 1e-8;

/// Seed breakpoints in `t = y − ζ` beyond the `ζ`-scaled ones.
const T_BREAKS: [f64; 10] = [1.0, 3.0, 6.0, 10.0, 14.0, 19.0, 25.0, 32.0, 40.0, 48.0];

/// Seed breakpoints of the outer `ζ` integral at zero temperature.
const ZETA_BREAKS: [f64; 19] = [
    0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 25.0, 30.0, 36.0, 42.0,
    50.0, 60.0,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LifshitzError {
    #[error("temperature must be finite and >= 0 K (> 0 K for this operation), got {0}")]
    InvalidTemperature(f64),
    #[error("separation must be finite and > 0 m, got {0}")]
    InvalidSeparation(f64),
    #[error("invalid numerical settings: {0}")]
    InvalidSettings(String),
    #[error("Matsubara sum for the {quantity} not converged after {terms} terms (partial sum {partial:e}, last term {last_term:e})")]
    Convergence {
        quantity: &'static str,
        terms: u64,
        partial: f64,
        last_term: f64,
    },
    #[error("{quantity} derivative unstable after {halvings} halvings: {value:e} +- {error:e}")]
    DerivativeUnstable {
        quantity: &'static str,
        value: f64,
        error: f64,
        halvings: usize,
    },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

impl LifshitzError {
    /// Whether the failure is numerical (as opposed to invalid input).
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            LifshitzError::Convergence { .. }
                | LifshitzError::DerivativeUnstable { .. }
                | LifshitzError::Quadrature(QuadratureError::NoConvergence { .. })
                | LifshitzError::SpecialFunction(SpecFunError::NoConvergence { .. })
        )
    }
}

/// `τ = 4πk_B aT/(ħc)`.
pub fn tau(separation: f64, temperature: f64) -> f64 {
    4.0 * PI * K_B * separation * temperature / (HBAR * C)
}

/// Temperature at which `tau(separation, T) = tau`.
pub fn temperature_for_tau(separation: f64, tau: f64) -> f64 {
    tau * HBAR * C / (4.0 * PI * K_B * separation)
}

/// `ξ_l = 2πk_B T l/ħ` in rad/s.
pub fn matsubara_frequency(l: u64, temperature: f64) -> f64 {
    2.0 * PI * K_B * temperature * l as f64 / HBAR
}

/// Two semispaces separated by a vacuum gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateConfiguration {
    pub material_1: PermittivityModel,
    pub material_2: PermittivityModel,
    pub separation: f64,
    pub temperature: f64,
}

impl PlateConfiguration {
    pub fn new(
        material_1: PermittivityModel,
        material_2: PermittivityModel,
        separation: f64,
        temperature: f64,
    ) -> Result<Self, LifshitzError> {
        if !(separation > 0.0 && separation.is_finite()) {
            return Err(LifshitzError::InvalidSeparation(separation));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(LifshitzError::InvalidTemperature(temperature));
        }
        Ok(Self {
            material_1,
            material_2,
            separation,
            temperature,
        })
    }

    pub fn tau(&self) -> f64 {
        tau(self.separation, self.temperature)
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self.clone()
        }
    }

    pub fn with_separation(&self, separation: f64) -> Self {
        Self {
            separation,
            ..self.clone()
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            material_1: self.material_2.clone(),
            material_2: self.material_1.clone(),
            ..self.clone()
        }
    }

    /// Whether either plate's response depends on temperature.
    pub fn is_temperature_dependent(&self) -> bool {
        self.material_1.is_temperature_dependent() || self.material_2.is_temperature_dependent()
    }

    fn check(&self) -> Result<(), LifshitzError> {
        Self::new(
            PermittivityModel::IdealMetal,
            PermittivityModel::IdealMetal,
            self.separation,
            self.temperature,
        )
        .map(|_| ())
    }
}

/// Tolerances and step sizes of the numerical schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericalSettings {
    /// Relative tolerance of each `y` integral.
    pub y_quad_rel_tol: f64,
    /// Relative tolerance of the Matsubara truncation.
    pub matsubara_rel_tol: f64,
    pub l_max_cap: u64,
    /// Initial finite-difference step as a fraction of `a` or `T`.
    pub diff_step_fraction: f64,
}

impl Default for NumericalSettings {
    fn default() -> Self {
        Self {
            y_quad_rel_tol: 1e-10,
            matsubara_rel_tol: 1e-9,
            l_max_cap: 100_000,
            diff_step_fraction: 0.05,
        }
    }
}

impl NumericalSettings {
    pub fn validate(&self) -> Result<(), LifshitzError> {
        for (name, v) in [
            ("y_quad_rel_tol", self.y_quad_rel_tol),
            ("matsubara_rel_tol", self.matsubara_rel_tol),
        ] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(LifshitzError::InvalidSettings(format!(
                    "{name} must lie in (0, 1e-4], got {v}"
                )));
            }
        }
        if self.l_max_cap < 10 {
            return Err(LifshitzError::InvalidSettings(format!(
                "l_max_cap must be >= 10, got {}",
                self.l_max_cap
            )));
        }
        if !(self.diff_step_fraction > 0.0 && self.diff_step_fraction < 0.5) {
            return Err(LifshitzError::InvalidSettings(format!(
                "diff_step_fraction must lie in (0, 0.5), got {}",
                self.diff_step_fraction
            )));
        }
        Ok(())
    }

    /// Settings for quantities obtained as differences of free energies,
    /// where the user tolerances would swamp the signal. The quadrature
    /// stops at its roundoff floor, so these are effectively "as tight as
    /// double precision allows".
    pub fn for_differences(&self) -> Self {
        Self {
            y_quad_rel_tol: self.y_quad_rel_tol.min(1e-14),
            matsubara_rel_tol: self.matsubara_rel_tol.min(1e-16),
            ..*self
        }
    }
}

/// Numerical bookkeeping attached to every computed value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Matsubara terms summed, including `l = 0` (0 for zero-temperature
    /// integrals).
    pub terms_used: u64,
    /// Bound on the neglected Matsubara tail, in the value's units.
    pub truncation_error: f64,
    /// Accumulated quadrature error estimate, in the value's units.
    pub quadrature_error: f64,
    /// Finite-difference error estimate, for derivative quantities.
    pub derivative_error: f64,
    /// `T = 0` or `τ < 1e-8`: the value is the zero-temperature integral.
    pub zero_temperature_route: bool,
}

/// A value with its total error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluated {
    pub value: f64,
    pub error: f64,
    pub diagnostics: Diagnostics,
}

impl Evaluated {
    fn from_diagnostics(value: f64, diagnostics: Diagnostics) -> Self {
        Self {
            value,
            error: diagnostics.truncation_error + diagnostics.quadrature_error + diagnostics.derivative_error,
            diagnostics,
        }
    }

    fn difference(self, other: Evaluated) -> Evaluated {
        let d = Diagnostics {
            terms_used: self.diagnostics.terms_used.max(other.diagnostics.terms_used),
            truncation_error: self.diagnostics.truncation_error + other.diagnostics.truncation_error,
            quadrature_error: self.diagnostics.quadrature_error + other.diagnostics.quadrature_error,
            derivative_error: self.diagnostics.derivative_error + other.diagnostics.derivative_error,
            zero_temperature_route: self.diagnostics.zero_temperature_route,
        };
        Evaluated::from_diagnostics(self.value - other.value, d)
    }
}

/// Free energy, pressure and entropy at one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalQuantities {
    pub tau: f64,
    pub free_energy: Evaluated,
    pub pressure: Evaluated,
    pub entropy: Evaluated,
}

/// Thermal corrections `ΔF = F(T) − E`.
///
/// `value` subtracts the zero-temperature energy with materials at `T = 0`.
/// For temperature-dependent materials `frozen_materials` also reports the
/// correction with the zero-temperature energy evaluated using the material
/// parameters at `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalCorrection {
    pub value: Evaluated,
    pub frozen_materials: Option<Evaluated>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Energy,
    Pressure,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Energy => "free energy",
            Kind::Pressure => "pressure",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Response {
    Ideal,
    Eps(f64),
}

impl Response {
    fn is_vacuum(self) -> bool {
        matches!(self, Response::Eps(e) if e == 1.0)
    }

    #[inline]
    fn coefficients(self, zeta: f64, y: f64) -> (f64, f64) {
        match self {
            Response::Ideal => (1.0, 1.0),
            Response::Eps(e) => coefficients(e, zeta, y),
        }
    }
}

/// `ln(1 − R e^{−y})`.
#[inline]
fn log_factor(r: f64, y: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let x = r * (-y).exp();
    if x < 0.5 {
        (-x).ln_1p()
    } else {
        ((1.0 - r) - r * (-y).exp_m1()).ln()
    }
}

/// `R / (e^y − R)`.
#[inline]
fn occupation(r: f64, y: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r / (y.exp_m1() + (1.0 - r))
    }
}

#[inline]
fn kernel(kind: Kind, y: f64, r_tm: f64, r_te: f64) -> f64 {
    match kind {
        Kind::Energy => y * (log_factor(r_tm, y) + log_factor(r_te, y)),
        Kind::Pressure => y * y * (occupation(r_tm, y) + occupation(r_te, y)),
    }
}

/// `∫_ζ^∞ kernel dy` with the reflection products supplied as a function of `y`.
fn y_integral<R>(kind: Kind, zeta: f64, products: R, rel_tol: f64) -> Result<Estimate, QuadratureError>
where
    R: Fn(f64) -> (f64, f64),
{
    let mut bp = Vec::with_capacity(32);
    bp.push(0.0);
    if zeta < 1.0 {
        // Coefficients vary on the scale y ~ ζ; resolve it geometrically.
        let scale = if zeta > 0.0 { zeta } else { 1e-4 };
        let mut t = scale;
        while t < 0.5 {
            bp.push(t);
            t = 2.0 * t + scale;
        }
    }
    bp.extend_from_slice(&T_BREAKS);
    integrate(
        |t| {
            let y = zeta + t;
            let (r_tm, r_te) = products(y);
            kernel(kind, y, r_tm, r_te)
        },
        &bp,
        Tolerance::relative(rel_tol),
    )
}

fn pair_products(r1: Response, r2: Response, zeta: f64) -> impl Fn(f64) -> (f64, f64) {
    move |y| {
        let (tm1, te1) = r1.coefficients(zeta, y);
        let (tm2, te2) = r2.coefficients(zeta, y);
        (tm1 * tm2, te1 * te2)
    }
}

fn polylog3(z: f64) -> Result<f64, LifshitzError> {
    let policy = PrecisionPolicy::new(1e-15, 10_000_000).expect("valid policy");
    Ok(polylog_with(3, z, &policy)?)
}

/// Half-weighted `l = 0` term. Constant products integrate in closed form:
/// `∫ y ln(1 − Re^{−y}) = −Li₃(R)`, `∫ y² R/(e^y − R) = 2Li₃(R)`.
fn zero_term(
    kind: Kind,
    z1: ZeroFreqPair,
    z2: ZeroFreqPair,
    rel_tol: f64,
) -> Result<Estimate, LifshitzError> {
    let closed = |r: f64| -> Result<f64, LifshitzError> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let li = polylog3(r)?;
        Ok(match kind {
            Kind::Energy => -li,
            Kind::Pressure => 2.0 * li,
        })
    };
    let tm = closed(z1.r_par0 * z2.r_par0)?;
    let te = match (z1.constant_perp(), z2.constant_perp()) {
        (Some(a), Some(b)) => Estimate {
            value: closed(a * b)?,
            abs_error: 0.0,
            evaluations: 0,
        },
        (Some(0.0), None) | (None, Some(0.0)) => Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        },
        _ => y_integral(kind, 0.0, |y| (0.0, z1.r_perp(y) * z2.r_perp(y)), rel_tol)?,
    };
    Ok(Estimate {
        value: 0.5 * (tm + te.value),
        abs_error: 0.5 * (tm.abs() * 1e-15 + te.abs_error),
        evaluations: te.evaluations,
    })
}

fn matsubara_response(model: &PermittivityModel, l: u64, temperature: f64) -> Result<Response, MaterialError> {
    match model {
        PermittivityModel::IdealMetal => Ok(Response::Ideal),
        _ => Ok(Response::Eps(eps_at_matsubara(model, l, temperature)?)),
    }
}

fn response_at(model: &PermittivityModel, xi: f64, material_temperature: f64) -> Result<Response, MaterialError> {
    match model {
        PermittivityModel::IdealMetal => Ok(Response::Ideal),
        _ => Ok(Response::Eps(eval_eps(model, xi, Some(material_temperature))?)),
    }
}

fn matsubara_term(
    cfg: &PlateConfiguration,
    kind: Kind,
    l: u64,
    tau: f64,
    rel_tol: f64,
) -> Result<Estimate, LifshitzError> {
    let r1 = matsubara_response(&cfg.material_1, l, cfg.temperature)?;
    let r2 = matsubara_response(&cfg.material_2, l, cfg.temperature)?;
    if r1.is_vacuum() || r2.is_vacuum() {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let zeta = tau * l as f64;
    Ok(y_integral(kind, zeta, pair_products(r1, r2, zeta), rel_tol)?)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

struct SumOutcome {
    value: f64,
    quadrature_error: f64,
    truncation_error: f64,
    terms: u64,
}

/// Dimensionless `Σ'_l I_l`.
///
/// Stops at the third consecutive term whose geometric tail bound
/// `|I_l|/(1 − e^{−τ})` is below `matsubara_rel_tol · |partial sum|`.
fn matsubara_sum(cfg: &PlateConfiguration, ns: &NumericalSettings, kind: Kind) -> Result<SumOutcome, LifshitzError> {
    let tau = cfg.tau();
    let a = cfg.separation;
    let z1 = zero_freq_pair(&cfg.material_1, Some(a))?;
    let z2 = zero_freq_pair(&cfg.material_2, Some(a))?;
    let zero = zero_term(kind, z1, z2, ns.y_quad_rel_tol)?;

    let mut sum = CompensatedSum::default();
    sum.add(zero.value);
    let mut quadrature_error = zero.abs_error;
    let tail_factor = -(-tau).exp_m1();
    let mut small_run = 0;
    let mut next = 1u64;
    let mut last = zero.value;
    while next <= ns.l_max_cap {
        let end = (next + CHUNK).min(ns.l_max_cap + 1);
        let terms: Vec<Estimate> = (next..end)
            .into_par_iter()
            .map(|l| matsubara_term(cfg, kind, l, tau, ns.y_quad_rel_tol))
            .collect::<Result<_, _>>()?;
        for (i, term) in terms.iter().enumerate() {
            sum.add(term.value);
            quadrature_error += term.abs_error;
            last = term.value;
            let partial = sum.value();
            if term.value.abs() <= ns.matsubara_rel_tol * partial.abs() * tail_factor {
                small_run += 1;
            } else {
                small_run = 0;
            }
            if small_run == 3 {
                return Ok(SumOutcome {
                    value: partial,
                    quadrature_error,
                    truncation_error: term.value.abs() / tail_factor,
                    terms: next + i as u64 + 1,
                });
            }
        }
        next = end;
    }
    Err(LifshitzError::Convergence {
        quantity: kind.name(),
        terms: ns.l_max_cap + 1,
        partial: sum.value(),
        last_term: last,
    })
}

/// `ħc/(32π²a³)`.
fn energy_scale(a: f64) -> f64 {
    HBAR * C / (32.0 * PI * PI * a * a * a)
}

fn finite_temperature(cfg: &PlateConfiguration, ns: &NumericalSettings, kind: Kind) -> Result<Evaluated, LifshitzError> {
    cfg.check()?;
    ns.validate()?;
    let tau = cfg.tau();
    if tau < TAU_ZERO_ROUTE {
        let mut e = zero_temperature(cfg, ns, kind, 0.0)?;
        e.diagnostics.zero_temperature_route = true;
        return Ok(e);
    }
    let scale = match kind {
        Kind::Energy => energy_scale(cfg.separation) * tau,
        Kind::Pressure => -energy_scale(cfg.separation) * tau / cfg.separation,
    };
    let s = matsubara_sum(cfg, ns, kind).map_err(|e| match e {
        LifshitzError::Convergence {
            quantity,
            terms,
            partial,
            last_term,
        } => LifshitzError::Convergence {
            quantity,
            terms,
            partial: scale * partial,
            last_term: scale * last_term,
        },
        e => e,
    })?;
    Ok(Evaluated::from_diagnostics(
        scale * s.value,
        Diagnostics {
            terms_used: s.terms,
            truncation_error: scale.abs() * s.truncation_error,
            quadrature_error: scale.abs() * s.quadrature_error,
            derivative_error: 0.0,
            zero_temperature_route: false,
        },
    ))
}

/// Free energy per unit area, J/m².
///
/// `T = 0` (or `τ < 1e-8`) returns the zero-temperature energy.
pub fn free_energy(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    finite_temperature(cfg, ns, Kind::Energy)
}

/// Pressure, Pa; negative means attraction.
pub fn pressure(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    finite_temperature(cfg, ns, Kind::Pressure)
}

/// `E(a) = (ħc/32π²a³) ∫₀^∞ dζ ∫_ζ^∞ dy f(ζ, y)`, materials at `T = 0`.
pub fn zero_temperature_energy(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    cfg.check()?;
    ns.validate()?;
    zero_temperature(cfg, ns, Kind::Energy, 0.0)
}

/// `P₀(a)`, the zero-temperature pressure, materials at `T = 0`.
pub fn zero_temperature_pressure(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    cfg.check()?;
    ns.validate()?;
    zero_temperature(cfg, ns, Kind::Pressure, 0.0)
}

fn zero_temperature(
    cfg: &PlateConfiguration,
    ns: &NumericalSettings,
    kind: Kind,
    material_temperature: f64,
) -> Result<Evaluated, LifshitzError> {
    let a = cfg.separation;
    let failure: RefCell<Option<LifshitzError>> = RefCell::new(None);
    let worst_inner = RefCell::new(0.0f64);
    let g = |zeta: f64| -> f64 {
        let xi = zeta * C / (2.0 * a);
        let r = response_at(&cfg.material_1, xi, material_temperature)
            .and_then(|r1| Ok((r1, response_at(&cfg.material_2, xi, material_temperature)?)));
        let (r1, r2) = match r {
            Ok(pair) => pair,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e.into());
                return f64::NAN;
            }
        };
        if r1.is_vacuum() || r2.is_vacuum() {
            return 0.0;
        }
        match y_integral(kind, zeta, pair_products(r1, r2, zeta), ns.y_quad_rel_tol) {
            Ok(est) => {
                if est.value != 0.0 {
                    let mut w = worst_inner.borrow_mut();
                    *w = w.max(est.abs_error / est.value.abs());
                }
                est.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e.into());
                f64::NAN
            }
        }
    };
    let outer = integrate(g, &ZETA_BREAKS, Tolerance::relative(ns.y_quad_rel_tol));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let scale = match kind {
        Kind::Energy => energy_scale(a),
        Kind::Pressure => -energy_scale(a) / a,
    };
    let inner = worst_inner.into_inner() * outer.value.abs();
    Ok(Evaluated::from_diagnostics(
        scale * outer.value,
        Diagnostics {
            terms_used: 0,
            truncation_error: 0.0,
            quadrature_error: scale.abs() * (outer.abs_error + inner),
            derivative_error: 0.0,
            zero_temperature_route: true,
        },
    ))
}

fn correction(
    cfg: &PlateConfiguration,
    ns: &NumericalSettings,
    kind: Kind,
) -> Result<ThermalCorrection, LifshitzError> {
    if !(cfg.temperature > 0.0) {
        return Err(LifshitzError::InvalidTemperature(cfg.temperature));
    }
    let tight = ns.for_differences();
    let full = finite_temperature(cfg, &tight, kind)?;
    let zero = zero_temperature(cfg, &tight, kind, 0.0)?;
    let frozen_materials = if cfg.is_temperature_dependent() {
        let frozen = zero_temperature(cfg, &tight, kind, cfg.temperature)?;
        Some(full.difference(frozen))
    } else {
        None
    };
    Ok(ThermalCorrection {
        value: full.difference(zero),
        frozen_materials,
    })
}

/// `ΔF(a, T) = F(a, T) − E(a)`.
pub fn thermal_correction(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<ThermalCorrection, LifshitzError> {
    correction(cfg, ns, Kind::Energy)
}

/// `ΔP(a, T) = P(a, T) − P₀(a)`.
pub fn pressure_thermal_correction(
    cfg: &PlateConfiguration,
    ns: &NumericalSettings,
) -> Result<ThermalCorrection, LifshitzError> {
    correction(cfg, ns, Kind::Pressure)
}

fn derivative_of_free_energy<G>(
    ns: &NumericalSettings,
    x: f64,
    quantity: &'static str,
    rebuild: G,
) -> Result<Evaluated, LifshitzError>
where
    G: Fn(f64) -> PlateConfiguration,
{
    let tight = ns.for_differences();
    let mut terms = 0;
    let d = central_derivative(
        |v| {
            let f = free_energy(&rebuild(v), &tight)?;
            terms = terms.max(f.diagnostics.terms_used);
            Ok((f.value, f.error))
        },
        x,
        ns.diff_step_fraction * x,
        DiffOptions {
            rel_tol: ns.matsubara_rel_tol,
            max_halvings: 6,
        },
    )
    .map_err(|e| match e {
        DiffError::Evaluation(e) => e,
        DiffError::Unstable { value, error, halvings } => LifshitzError::DerivativeUnstable {
            quantity,
            value: -value,
            error,
            halvings,
        },
        DiffError::InvalidStep(h) => LifshitzError::InvalidSettings(format!("finite-difference step {h}")),
    })?;
    Ok(Evaluated::from_diagnostics(
        -d.value,
        Diagnostics {
            terms_used: terms,
            derivative_error: d.error,
            ..Diagnostics::default()
        },
    ))
}

/// `S = −∂F/∂T`, J/(K·m²), by Richardson-extrapolated central differences.
///
/// Successive extrapolations must agree to `matsubara_rel_tol` or to the
/// propagated noise of the free energies, whichever is larger.
pub fn entropy(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    cfg.check()?;
    ns.validate()?;
    if !(cfg.temperature > 0.0) {
        return Err(LifshitzError::InvalidTemperature(cfg.temperature));
    }
    derivative_of_free_energy(ns, cfg.temperature, "entropy", |t| cfg.with_temperature(t))
}

/// `−∂F/∂a` by the same scheme as [`entropy`]; an independent route to the
/// pressure.
pub fn pressure_from_free_energy(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<Evaluated, LifshitzError> {
    cfg.check()?;
    ns.validate()?;
    derivative_of_free_energy(ns, cfg.separation, "pressure", |a| cfg.with_separation(a))
}

/// Free energy, pressure and entropy together.
pub fn thermal_quantities(cfg: &PlateConfiguration, ns: &NumericalSettings) -> Result<ThermalQuantities, LifshitzError> {
    ns.validate()?;
    Ok(ThermalQuantities {
        tau: cfg.tau(),
        free_energy: free_energy(cfg, ns)?,
        pressure: pressure(cfg, ns)?,
        entropy: entropy(cfg, ns)?,
    })
}
