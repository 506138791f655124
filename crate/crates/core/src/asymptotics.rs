//! Closed-form low- and high-temperature expansions.
//!
//! Low-temperature thermal corrections have the form
//!
//! ```text
//! ΔF = −(ħc/32π²a³)[Aτ³ − C₄τ⁴],  ΔP = −(ħc/32π²a⁴)C₄τ⁴,
//! S  = (k_B/2πa²)[¾Aτ² − C₄τ³]
//! ```
//!
//! with `A` and `C₄` (`K₄` for metal–dielectric) depending only on the
//! static permittivities. At high temperature only the `l = 0` Matsubara term
//! survives.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::constants::{C, HBAR, K_B, ZETA3};
use crate::lifshitz::{tau, zero_temperature_energy, zero_temperature_pressure, LifshitzError, NumericalSettings, PlateConfiguration};
use crate::materials::{beta, static_eps, DcAugmentedModel, MaterialError, PermittivityModel};
use crate::reflection::r0;
use crate::specfun::{polylog, polylog_with, PrecisionPolicy, SpecFunError};

/// Below this `|√ε₁ − √ε₂|` the dissimilar `C₄` uses the equal-permittivity form.
pub const DELTA_SWITCH: f64 = 1e-5;

// ζ(3) − Li₃ cancels; the default 1e−12 is not enough.
const TIGHT: PrecisionPolicy = PrecisionPolicy::tight();

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error("static permittivity must be finite and >= 1, got {0}")]
    Permittivity(f64),
    #[error("{what} must be finite and {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("no closed form for {0}")]
    NotApplicable(String),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
}

/// Which thermodynamic quantity an expansion describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    FreeEnergy,
    Pressure,
    Entropy,
}

/// Plate pairing for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    DielectricDielectric,
    MetalDielectric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    LowTau,
    HighTau,
}

/// Value of an expansion.
///
/// For `FreeEnergy` and `Pressure` at low `τ`, `value` is the thermal
/// correction; [`with_zero_temperature`] adds `E(a)` or `P₀(a)`. For
/// `Entropy` it is the entropy itself, and at high `τ` every quantity is
/// absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticResult {
    pub value: f64,
    /// `A` of the `τ³` free-energy term at low `τ`; `Li₃` of the
    /// zero-frequency product at high `τ`.
    pub leading_coefficient: f64,
    /// `C₄` or `K₄` (zero at high `τ`).
    pub c4_or_k4: f64,
    pub validity: Validity,
}

fn check_eps(eps0: f64) -> Result<(), AsymptoticError> {
    if eps0 >= 1.0 && eps0.is_finite() {
        Ok(())
    } else {
        Err(AsymptoticError::Permittivity(eps0))
    }
}

fn check_geometry(a: f64, t: f64) -> Result<(), AsymptoticError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(AsymptoticError::Domain {
            what: "separation",
            constraint: "> 0 m",
            value: a,
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(AsymptoticError::Domain {
            what: "temperature",
            constraint: ">= 0 K",
            value: t,
        });
    }
    Ok(())
}

/// `C₄(ε₀) = (√ε₀ − 1)(ε₀² + ε₀^{3/2} − 2)/720`.
pub fn c4_equal(eps0: f64) -> Result<f64, AsymptoticError> {
    check_eps(eps0)?;
    let s = eps0.sqrt();
    Ok((s - 1.0) * (eps0 * eps0 + eps0 * s - 2.0) / 720.0)
}

/// `K₄(ε₀) = (1 − 2ε₀√ε₀ + ε₀²√ε₀)/360`.
pub fn k4(eps0: f64) -> Result<f64, AsymptoticError> {
    check_eps(eps0)?;
    let s = eps0.sqrt();
    Ok((1.0 - 2.0 * eps0 * s + eps0 * eps0 * s) / 360.0)
}

/// `C₄` for plates with different static permittivities.
///
/// The `Artanh(z)/(√ε₁ − √ε₂)` factor has a removable singularity; below
/// [`DELTA_SWITCH`] the equal-permittivity value at the mean is returned.
pub fn c4_dissimilar(eps01: f64, eps02: f64) -> Result<f64, AsymptoticError> {
    check_eps(eps01)?;
    check_eps(eps02)?;
    let (eps01, eps02) = if eps01 >= eps02 { (eps01, eps02) } else { (eps02, eps01) };
    let (s1, s2) = (eps01.sqrt(), eps02.sqrt());
    if (s1 - s2).abs() < DELTA_SWITCH {
        return c4_equal(0.5 * (eps01 + eps02));
    }
    let p = eps01 * eps02;
    let sp = p.sqrt();
    let sum = eps01 + eps02;
    let ssum = sum.sqrt();
    let z = ssum * (s1 - s2) / (sp - sum);
    let artanh = 0.5 * ((1.0 + z) / (1.0 - z)).ln();
    let bracket = -(sum * sum) * (2.0 * sum + sp - p) + p * sp * (5.0 * p - 3.0 * sum + 1.0)
        + sp * (s1 - s2).powi(2) * (p * sp - sp - sum)
        - 3.0 * p * p * (eps01 - 1.0) * (eps02 - 1.0) / ((s1 - s2) * ssum) * artanh;
    Ok((2.0 + bracket / ((s1 + s2) * sum * sum)) / 720.0)
}

/// `A` for two dielectrics: `ζ(3)/(8π²) · (ε₁+ε₂+2ε₁ε₂)(ε₁−1)(ε₂−1) / ((ε₁+1)(ε₂+1)(ε₁+ε₂))`.
pub fn leading_coefficient_dielectric(eps01: f64, eps02: f64) -> Result<f64, AsymptoticError> {
    check_eps(eps01)?;
    check_eps(eps02)?;
    let x = (eps01 + eps02 + 2.0 * eps01 * eps02) / ((eps01 + 1.0) * (eps02 + 1.0)) * (eps01 - 1.0)
        * (eps02 - 1.0)
        / (eps01 + eps02);
    Ok(ZETA3 / (8.0 * PI * PI) * x)
}

/// `A` for an ideal metal facing a dielectric: `ζ(3)/(16π²) · (ε₀−1)²/(ε₀+1)`.
pub fn leading_coefficient_metal_dielectric(eps0: f64) -> Result<f64, AsymptoticError> {
    check_eps(eps0)?;
    Ok(ZETA3 / (16.0 * PI * PI) * (eps0 - 1.0).powi(2) / (eps0 + 1.0))
}

fn low_t(a: f64, t: f64, which: Quantity, lead: f64, c4: f64) -> Result<AsymptoticResult, AsymptoticError> {
    check_geometry(a, t)?;
    let tau = tau(a, t);
    let scale = HBAR * C / (32.0 * PI * PI * a.powi(3));
    let value = match which {
        Quantity::FreeEnergy => -scale * (lead * tau.powi(3) - c4 * tau.powi(4)),
        Quantity::Pressure => -scale / a * c4 * tau.powi(4),
        Quantity::Entropy => K_B / (2.0 * PI * a * a) * (0.75 * lead * tau * tau - c4 * tau.powi(3)),
    };
    Ok(AsymptoticResult {
        value,
        leading_coefficient: lead,
        c4_or_k4: c4,
        validity: Validity::LowTau,
    })
}

/// Low-`τ` expansion for two dielectrics (similar or not).
pub fn low_t_dielectric(
    eps01: f64,
    eps02: f64,
    a: f64,
    t: f64,
    which: Quantity,
) -> Result<AsymptoticResult, AsymptoticError> {
    let lead = leading_coefficient_dielectric(eps01, eps02)?;
    let c4 = c4_dissimilar(eps01, eps02)?;
    low_t(a, t, which, lead, c4)
}

/// Low-`τ` expansion for an ideal metal facing a dielectric.
pub fn low_t_metal_dielectric(eps0: f64, a: f64, t: f64, which: Quantity) -> Result<AsymptoticResult, AsymptoticError> {
    let lead = leading_coefficient_metal_dielectric(eps0)?;
    low_t(a, t, which, lead, k4(eps0)?)
}

/// Low-`τ` expansion for two ideal metals; `A = ζ(3)/(4π²)`, `C₄ = 1/360`.
pub fn low_t_ideal_metal(a: f64, t: f64, which: Quantity) -> Result<AsymptoticResult, AsymptoticError> {
    low_t(a, t, which, ZETA3 / (4.0 * PI * PI), 1.0 / 360.0)
}

/// `S = (3k_Bζ(3)/32π³a²) τ² [1 − 2π²τ/(135ζ(3))]` for two ideal metals.
pub fn ideal_metal_low_t_entropy(a: f64, t: f64) -> Result<AsymptoticResult, AsymptoticError> {
    low_t_ideal_metal(a, t, Quantity::Entropy)
}

/// Low-`τ` expansion for any pair with one; conducting plates have none.
pub fn low_t_pair(pair: StaticPair, a: f64, t: f64, which: Quantity) -> Result<AsymptoticResult, AsymptoticError> {
    match pair {
        StaticPair::Dielectrics(e1, e2) => low_t_dielectric(e1, e2, a, t, which),
        StaticPair::MetalDielectric(e) => low_t_metal_dielectric(e, a, t, which),
        StaticPair::IdealMetals => low_t_ideal_metal(a, t, which),
        StaticPair::ConductingPlates => Err(AsymptoticError::NotApplicable(
            "low-temperature behaviour of Drude or dc-conducting plates".into(),
        )),
    }
}

/// Adds `E(a)` or `P₀(a)` of `cfg` to a low-`τ` correction.
pub fn with_zero_temperature(
    result: &AsymptoticResult,
    which: Quantity,
    cfg: &PlateConfiguration,
    ns: &NumericalSettings,
) -> Result<f64, AsymptoticError> {
    if result.validity == Validity::HighTau {
        return Ok(result.value);
    }
    Ok(match which {
        Quantity::FreeEnergy => result.value + zero_temperature_energy(cfg, ns)?.value,
        Quantity::Pressure => result.value + zero_temperature_pressure(cfg, ns)?.value,
        Quantity::Entropy => result.value,
    })
}

/// Static description of a plate pair for the high-`τ` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticPair {
    Dielectrics(f64, f64),
    /// Ideal metal facing a dielectric.
    MetalDielectric(f64),
    /// Both plates with zero-frequency pair `(1, 0)` (Drude or dc-conducting).
    ConductingPlates,
    /// Both plates ideal metals, `(1, 1)`: the classical limit.
    IdealMetals,
}

impl StaticPair {
    /// Closed-form class of a material pair; `None` when there is none
    /// (plasma plates, Drude or dc plates facing a dielectric).
    pub fn from_models(m1: &PermittivityModel, m2: &PermittivityModel) -> Option<StaticPair> {
        use PermittivityModel::{DcAugmented, Drude, IdealMetal};
        let finite = |m| static_eps(m).finite();
        match (m1, m2) {
            (IdealMetal, IdealMetal) => Some(StaticPair::IdealMetals),
            (Drude(_) | DcAugmented(_), Drude(_) | DcAugmented(_)) => Some(StaticPair::ConductingPlates),
            (IdealMetal, m) | (m, IdealMetal) => finite(m).map(StaticPair::MetalDielectric),
            _ => Some(StaticPair::Dielectrics(finite(m1)?, finite(m2)?)),
        }
    }

    /// Products `(R_tm, R_te)` of the zero-frequency coefficients.
    fn zero_frequency_products(self) -> Result<(f64, f64), AsymptoticError> {
        Ok(match self {
            StaticPair::Dielectrics(e1, e2) => {
                check_eps(e1)?;
                check_eps(e2)?;
                (r0(e1) * r0(e2), 0.0)
            }
            StaticPair::MetalDielectric(e) => {
                check_eps(e)?;
                (r0(e), 0.0)
            }
            StaticPair::ConductingPlates => (1.0, 0.0),
            StaticPair::IdealMetals => (1.0, 1.0),
        })
    }
}

/// High-`τ` limit, the `l = 0` term alone:
/// `F = −(k_BT/16πa²)L`, `P = −(k_BT/8πa³)L`, `S = (k_B/16πa²)L` with
/// `L = Li₃(R_tm) + Li₃(R_te)`.
pub fn high_t(pair: StaticPair, a: f64, t: f64, which: Quantity) -> Result<AsymptoticResult, AsymptoticError> {
    check_geometry(a, t)?;
    let (r_tm, r_te) = pair.zero_frequency_products()?;
    let l = polylog(3, r_tm)? + polylog(3, r_te)?;
    let value = match which {
        Quantity::FreeEnergy => -K_B * t / (16.0 * PI * a * a) * l,
        Quantity::Pressure => -K_B * t / (8.0 * PI * a.powi(3)) * l,
        Quantity::Entropy => K_B / (16.0 * PI * a * a) * l,
    };
    Ok(AsymptoticResult {
        value,
        leading_coefficient: l,
        c4_or_k4: 0.0,
        validity: Validity::HighTau,
    })
}

/// `T → 0` entropy left by the dc conductivity term:
/// `(k_B/16πa²)[ζ(3) − Li₃(r₀²)]`, or `Li₃(r₀)` for metal–dielectric.
pub fn dc_violation_entropy(eps0: f64, a: f64, kind: ConfigKind) -> Result<f64, AsymptoticError> {
    check_eps(eps0)?;
    check_geometry(a, 0.0)?;
    let r = r0(eps0);
    let arg = match kind {
        ConfigKind::DielectricDielectric => r * r,
        ConfigKind::MetalDielectric => r,
    };
    Ok(K_B / (16.0 * PI * a * a) * (ZETA3 - polylog_with(3, arg, &TIGHT)?))
}

/// Leading logarithmic form of the first-order-in-`β` remainder,
/// `R₁ ≈ k_B Li₂(q) / (4πa²(ε₀² − 1)) · Tβ(T) ln τ`, with `q = r₀²` for two
/// dielectrics and `q = r₀` for metal–dielectric (standard `Li₂`).
pub fn dc_r1_scaling_probe(
    model: &DcAugmentedModel,
    a: f64,
    temperatures: &[f64],
    kind: ConfigKind,
) -> Result<Vec<(f64, f64)>, AsymptoticError> {
    if temperatures.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(AsymptoticError::Domain {
            what: "temperature sequence",
            constraint: "strictly decreasing",
            value: f64::NAN,
        });
    }
    let eps0 = model.base().static_eps();
    check_eps(eps0)?;
    let r = r0(eps0);
    let q = match kind {
        ConfigKind::DielectricDielectric => r * r,
        ConfigKind::MetalDielectric => r,
    };
    let li2 = polylog(2, q)?;
    temperatures
        .iter()
        .map(|&t| {
            check_geometry(a, t)?;
            if t == 0.0 {
                return Ok((t, 0.0));
            }
            let b = beta(model, t)?;
            let coefficient = K_B * li2 / (4.0 * PI * a * a * (eps0 * eps0 - 1.0));
            Ok((t, coefficient * t * b * tau(a, t).ln()))
        })
        .collect()
}
