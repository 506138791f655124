//! Dielectric response models evaluated on the imaginary frequency axis.
//!
//! Every model returns `ε(iξ)` for `ξ > 0`. The static limit is only finite
//! for oscillator and tabulated models; metals and conductivity-augmented
//! dielectrics report [`MaterialError::StaticDivergence`] at `ξ = 0` so that
//! callers go through the zero-frequency reflection rules instead.

mod io;
mod optical;

pub use io::{load_material_file, parse_material_json, preset, resolve_material, MaterialSpec, PRESET_NAMES};
pub use optical::{kk_to_imaginary_axis, OpticalDataTable, OpticalTableModel, TailModel};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::constants::{HBAR, K_B};
use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("permittivity diverges at zero frequency for the {0} model")]
    StaticDivergence(&'static str),
    #[error("the ideal metal has no pointwise permittivity; use the reflection rules")]
    NotPointwise,
    #[error("the {0} model needs a temperature to be evaluated")]
    MissingTemperature(&'static str),
    #[error("{what} must satisfy {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("{side} tail carries {fraction:.3} of the Kramers-Kronig integral at xi = {xi:e} but no extrapolation is configured")]
    TailUnderspecified {
        side: &'static str,
        fraction: f64,
        xi: f64,
    },
    #[error("Kramers-Kronig quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

/// Ninham–Parsegian oscillator sum `ε(iξ) = 1 + Σ C_j / (1 + ξ²/ω_j²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorModel {
    strengths: Vec<f64>,
    frequencies: Vec<f64>,
}

impl OscillatorModel {
    pub fn new(strengths: Vec<f64>, frequencies: Vec<f64>) -> Result<Self, MaterialError> {
        if strengths.len() != frequencies.len() {
            return Err(MaterialError::Invalid(format!(
                "{} oscillator strengths but {} frequencies",
                strengths.len(),
                frequencies.len()
            )));
        }
        for &c in &strengths {
            if !(c > 0.0 && c.is_finite()) {
                return Err(MaterialError::Domain {
                    what: "oscillator strength C_j",
                    constraint: "C_j > 0",
                    value: c,
                });
            }
        }
        for &w in &frequencies {
            if !(w > 0.0 && w.is_finite()) {
                return Err(MaterialError::Domain {
                    what: "oscillator frequency omega_j",
                    constraint: "omega_j > 0 rad/s",
                    value: w,
                });
            }
        }
        Ok(Self {
            strengths,
            frequencies,
        })
    }

    /// No oscillators: `ε ≡ 1`.
    pub fn vacuum() -> Self {
        Self {
            strengths: Vec::new(),
            frequencies: Vec::new(),
        }
    }

    /// A single oscillator with the given static permittivity.
    pub fn single(eps0: f64, frequency: f64) -> Result<Self, MaterialError> {
        Self::new(vec![eps0 - 1.0], vec![frequency])
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `ε₀ = 1 + Σ C_j`.
    pub fn static_eps(&self) -> f64 {
        1.0 + self.strengths.iter().sum::<f64>()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        1.0 + self
            .strengths
            .iter()
            .zip(&self.frequencies)
            .map(|(c, w)| {
                let x = xi / w;
                c / (1.0 + x * x)
            })
            .sum::<f64>()
    }
}

/// Piecewise-linear profile `T ↦ value`, clamped outside the tabulated range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureProfile {
    points: Vec<(f64, f64)>,
}

impl TemperatureProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, MaterialError> {
        if points.is_empty() {
            return Err(MaterialError::Invalid("empty temperature profile".into()));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(MaterialError::Invalid(
                "temperature profile must be strictly increasing in T".into(),
            ));
        }
        if points.iter().any(|&(t, v)| !(t >= 0.0 && v >= 0.0 && t.is_finite() && v.is_finite())) {
            return Err(MaterialError::Invalid(
                "temperature profile entries must be finite and non-negative".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn at(&self, t: f64) -> f64 {
        let p = &self.points;
        if t <= p[0].0 {
            return p[0].1;
        }
        if t >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|&(ti, _)| ti <= t);
        let (t0, v0) = p[i - 1];
        let (t1, v1) = p[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// Drude relaxation parameter `ν(T)` in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Relaxation {
    Constant(f64),
    Tabulated(TemperatureProfile),
}

impl Relaxation {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Relaxation::Constant(nu) => *nu,
            Relaxation::Tabulated(p) => p.at(t),
        }
    }
}

/// `ε(iξ) = 1 + ω_p² / (ξ (ξ + ν(T)))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrudeModel {
    plasma_frequency: f64,
    relaxation: Relaxation,
}

impl DrudeModel {
    pub fn new(plasma_frequency: f64, relaxation: Relaxation) -> Result<Self, MaterialError> {
        check_plasma_frequency(plasma_frequency)?;
        if let Relaxation::Constant(nu) = relaxation {
            if !(nu >= 0.0 && nu.is_finite()) {
                return Err(MaterialError::Domain {
                    what: "relaxation nu",
                    constraint: "nu >= 0 rad/s",
                    value: nu,
                });
            }
        }
        Ok(Self {
            plasma_frequency,
            relaxation,
        })
    }

    pub fn plasma_frequency(&self) -> f64 {
        self.plasma_frequency
    }

    pub fn relaxation(&self) -> &Relaxation {
        &self.relaxation
    }

    pub fn eval(&self, xi: f64, temperature: f64) -> f64 {
        let nu = self.relaxation.at(temperature);
        1.0 + self.plasma_frequency * self.plasma_frequency / (xi * (xi + nu))
    }
}

/// `ε(iξ) = 1 + ω_p² / ξ²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlasmaModel {
    plasma_frequency: f64,
}

impl PlasmaModel {
    pub fn new(plasma_frequency: f64) -> Result<Self, MaterialError> {
        check_plasma_frequency(plasma_frequency)?;
        Ok(Self { plasma_frequency })
    }

    pub fn plasma_frequency(&self) -> f64 {
        self.plasma_frequency
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let x = self.plasma_frequency / xi;
        1.0 + x * x
    }
}

fn check_plasma_frequency(wp: f64) -> Result<(), MaterialError> {
    if wp > 0.0 && wp.is_finite() {
        Ok(())
    } else {
        Err(MaterialError::Domain {
            what: "plasma frequency omega_p",
            constraint: "omega_p > 0 rad/s",
            value: wp,
        })
    }
}

/// dc conductivity `σ₀(T)` in rad/s (Gaussian units, so `4πσ₀/ξ` is
/// dimensionless).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Conductivity {
    /// `σ₀(T) = σ₀(300 K) · exp(−b/T + b/300 K)`.
    Activated { sigma0_300k: f64, gap_b_k: f64 },
    Tabulated(TemperatureProfile),
}

impl Conductivity {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Conductivity::Activated {
                sigma0_300k,
                gap_b_k,
            } => {
                if t <= 0.0 {
                    0.0
                } else {
                    sigma0_300k * (gap_b_k / 300.0 - gap_b_k / t).exp()
                }
            }
            Conductivity::Tabulated(p) => {
                if t <= 0.0 {
                    0.0
                } else {
                    p.at(t)
                }
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Conductivity::Activated {
                sigma0_300k,
                gap_b_k,
            } => Conductivity::Activated {
                sigma0_300k: sigma0_300k * factor,
                gap_b_k: *gap_b_k,
            },
            Conductivity::Tabulated(p) => Conductivity::Tabulated(TemperatureProfile {
                points: p.points.iter().map(|&(t, s)| (t, s * factor)).collect(),
            }),
        }
    }
}

/// Oscillator dielectric with an added conductivity term,
/// `ε̃(iξ) = ε(iξ) + 4πσ₀(T)/ξ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcAugmentedModel {
    base: OscillatorModel,
    conductivity: Conductivity,
}

impl DcAugmentedModel {
    pub fn new(base: OscillatorModel, conductivity: Conductivity) -> Result<Self, MaterialError> {
        if let Conductivity::Activated {
            sigma0_300k,
            gap_b_k,
        } = conductivity
        {
            if !(sigma0_300k > 0.0 && sigma0_300k.is_finite()) {
                return Err(MaterialError::Domain {
                    what: "sigma0 at 300 K",
                    constraint: "sigma0 > 0 rad/s",
                    value: sigma0_300k,
                });
            }
            if !(gap_b_k > 0.0 && gap_b_k.is_finite()) {
                return Err(MaterialError::Domain {
                    what: "activation parameter b",
                    constraint: "b > 0 K",
                    value: gap_b_k,
                });
            }
        }
        Ok(Self { base, conductivity })
    }

    pub fn base(&self) -> &OscillatorModel {
        &self.base
    }

    pub fn conductivity(&self) -> &Conductivity {
        &self.conductivity
    }

    pub fn sigma0(&self, t: f64) -> f64 {
        self.conductivity.at(t)
    }

    /// Same model with `σ₀` multiplied by `factor` at every temperature.
    pub fn with_scaled_conductivity(&self, factor: f64) -> Self {
        Self {
            base: self.base.clone(),
            conductivity: self.conductivity.scaled(factor),
        }
    }

    pub fn eval(&self, xi: f64, temperature: f64) -> f64 {
        self.base.eval(xi) + 4.0 * std::f64::consts::PI * self.sigma0(temperature) / xi
    }
}

/// `β(T) = 2ħσ₀(T) / (k_B T)`.
pub fn beta(model: &DcAugmentedModel, temperature: f64) -> Result<f64, MaterialError> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(MaterialError::Domain {
            what: "temperature",
            constraint: "T > 0 K",
            value: temperature,
        });
    }
    Ok(2.0 * HBAR * model.sigma0(temperature) / (K_B * temperature))
}

/// Tagged union of the supported response models.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PermittivityModel {
    Oscillator(OscillatorModel),
    Drude(DrudeModel),
    Plasma(PlasmaModel),
    IdealMetal,
    DcAugmented(DcAugmentedModel),
    OpticalTable(OpticalTableModel),
}

/// Static permittivity, or the marker for models that diverge at `ξ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticPermittivity {
    Finite(f64),
    Divergent,
}

impl StaticPermittivity {
    pub fn finite(self) -> Option<f64> {
        match self {
            StaticPermittivity::Finite(e) => Some(e),
            StaticPermittivity::Divergent => None,
        }
    }
}

impl PermittivityModel {
    pub fn kind(&self) -> &'static str {
        match self {
            PermittivityModel::Oscillator(_) => "oscillator",
            PermittivityModel::Drude(_) => "drude",
            PermittivityModel::Plasma(_) => "plasma",
            PermittivityModel::IdealMetal => "ideal_metal",
            PermittivityModel::DcAugmented(_) => "dc_augmented",
            PermittivityModel::OpticalTable(_) => "optical_table",
        }
    }

    /// Whether `ε(iξ)` depends on temperature (and so on the Matsubara
    /// temperature context, not only on `ξ`).
    pub fn is_temperature_dependent(&self) -> bool {
        match self {
            PermittivityModel::Drude(d) => matches!(d.relaxation, Relaxation::Tabulated(_)),
            PermittivityModel::DcAugmented(_) => true,
            _ => false,
        }
    }

    /// Metallic in the sense of the zero-frequency rules (TM coefficient 1).
    pub fn is_metallic(&self) -> bool {
        matches!(
            self,
            PermittivityModel::IdealMetal | PermittivityModel::Drude(_) | PermittivityModel::Plasma(_)
        )
    }
}

impl fmt::Display for PermittivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match static_eps(self) {
            StaticPermittivity::Finite(e) => write!(f, "{} (eps0 = {e})", self.kind()),
            StaticPermittivity::Divergent => write!(f, "{} (eps0 divergent)", self.kind()),
        }
    }
}

/// `ε(iξ)` for `ξ ≥ 0`.
///
/// Drude and dc-augmented models need `temperature`; passing `None` for them
/// is an error.
pub fn eval_eps(
    model: &PermittivityModel,
    xi: f64,
    temperature: Option<f64>,
) -> Result<f64, MaterialError> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(MaterialError::Domain {
            what: "imaginary frequency xi",
            constraint: "xi >= 0 rad/s",
            value: xi,
        });
    }
    match model {
        PermittivityModel::IdealMetal => Err(MaterialError::NotPointwise),
        PermittivityModel::Oscillator(m) => Ok(m.eval(xi)),
        PermittivityModel::OpticalTable(m) => {
            if xi == 0.0 {
                Ok(m.static_eps())
            } else {
                m.eval(xi)
            }
        }
        PermittivityModel::Plasma(m) => {
            if xi == 0.0 {
                Err(MaterialError::StaticDivergence("plasma"))
            } else {
                Ok(m.eval(xi))
            }
        }
        PermittivityModel::Drude(m) => {
            if xi == 0.0 {
                return Err(MaterialError::StaticDivergence("drude"));
            }
            let t = temperature_for(m.relaxation.clone(), temperature)?;
            Ok(m.eval(xi, t))
        }
        PermittivityModel::DcAugmented(m) => {
            if xi == 0.0 {
                return Err(MaterialError::StaticDivergence("dc_augmented"));
            }
            let t = temperature.ok_or(MaterialError::MissingTemperature("dc_augmented"))?;
            Ok(m.eval(xi, t))
        }
    }
}

fn temperature_for(relaxation: Relaxation, temperature: Option<f64>) -> Result<f64, MaterialError> {
    match (relaxation, temperature) {
        (_, Some(t)) => Ok(t),
        // A constant relaxation does not care about T.
        (Relaxation::Constant(_), None) => Ok(0.0),
        (Relaxation::Tabulated(_), None) => Err(MaterialError::MissingTemperature("drude")),
    }
}

/// `ε(iξ_l)` at the `l`-th Matsubara frequency (`l ≥ 1`) of temperature `T`.
///
/// The dc-augmented model uses `ε(iξ_l) + β(T)/l`, which is the conductivity
/// term written in Matsubara form.
pub fn eps_at_matsubara(model: &PermittivityModel, l: u64, temperature: f64) -> Result<f64, MaterialError> {
    if l == 0 {
        return Err(MaterialError::Invalid(
            "the l = 0 term goes through the zero-frequency rules".into(),
        ));
    }
    let xi = crate::lifshitz::matsubara_frequency(l, temperature);
    match model {
        PermittivityModel::DcAugmented(m) => Ok(m.base.eval(xi) + beta(m, temperature)? / l as f64),
        _ => eval_eps(model, xi, Some(temperature)),
    }
}

/// `ε₀` for finite models, [`StaticPermittivity::Divergent`] otherwise.
pub fn static_eps(model: &PermittivityModel) -> StaticPermittivity {
    match model {
        PermittivityModel::Oscillator(m) => StaticPermittivity::Finite(m.static_eps()),
        PermittivityModel::OpticalTable(m) => StaticPermittivity::Finite(m.static_eps()),
        PermittivityModel::Drude(_)
        | PermittivityModel::Plasma(_)
        | PermittivityModel::IdealMetal
        | PermittivityModel::DcAugmented(_) => StaticPermittivity::Divergent,
    }
}
