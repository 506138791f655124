//! Fresnel coefficients on the imaginary frequency axis in the variables
//! `ζ = 2aξ/c` and `y = 2aq`, `y ≥ ζ`.
//!
//! Both coefficients are written in cancellation-free form:
//!
//! ```text
//! r_tm = (ε−1)((ε+1)y² − ζ²) / (εy + s)²,   r_te = ζ²(ε−1) / (s + y)²,
//! s = √(y² + ζ²(ε−1))
//! ```

use thiserror::Error;

use crate::constants::C;
use crate::materials::{static_eps, PermittivityModel, StaticPermittivity};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReflectionError {
    #[error("invalid point: need 0 <= zeta <= y, got zeta = {zeta}, y = {y}")]
    InvalidPoint { zeta: f64, y: f64 },
    #[error("permittivity must be finite and >= 1, got {0}; zero frequency goes through zero_freq_pair")]
    InvalidPermittivity(f64),
    #[error("the plasma zero-frequency TE coefficient needs the plate separation")]
    MissingSeparation,
}

/// A point `(ζ, y)` of the Lifshitz integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPoint {
    zeta: f64,
    y: f64,
}

impl DimensionlessPoint {
    pub fn new(zeta: f64, y: f64) -> Result<Self, ReflectionError> {
        if zeta >= 0.0 && y >= zeta && y.is_finite() {
            Ok(Self { zeta, y })
        } else {
            Err(ReflectionError::InvalidPoint { zeta, y })
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

fn check_eps(eps: f64) -> Result<(), ReflectionError> {
    if eps >= 1.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(ReflectionError::InvalidPermittivity(eps))
    }
}

/// TM (parallel) coefficient.
pub fn r_tm(eps: f64, p: DimensionlessPoint) -> Result<f64, ReflectionError> {
    check_eps(eps)?;
    Ok(coefficients(eps, p.zeta, p.y).0)
}

/// TE (perpendicular) coefficient.
pub fn r_te(eps: f64, p: DimensionlessPoint) -> Result<f64, ReflectionError> {
    check_eps(eps)?;
    Ok(coefficients(eps, p.zeta, p.y).1)
}

/// `(r_tm, r_te)` without argument checks.
#[inline]
pub fn coefficients(eps: f64, zeta: f64, y: f64) -> (f64, f64) {
    let em1 = eps - 1.0;
    let z2 = zeta * zeta;
    let s = (y * y + z2 * em1).sqrt();
    let d_tm = eps * y + s;
    let d_te = s + y;
    if d_te == 0.0 {
        // y = ζ = 0: only the TM limit survives.
        return (em1 / (eps + 1.0), 0.0);
    }
    let tm = em1 * ((eps + 1.0) * y * y - z2) / (d_tm * d_tm);
    let te = z2 * em1 / (d_te * d_te);
    (tm, te)
}

/// Zero-frequency TE coefficient, constant or bound to `w = 2aω_p/c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeZero {
    Constant(f64),
    Plasma { w: f64 },
}

/// Reflection coefficients at `ξ = 0`, fixed by the model class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFreqPair {
    pub r_par0: f64,
    pub r_perp0: TeZero,
}

impl ZeroFreqPair {
    pub fn r_perp(&self, y: f64) -> f64 {
        match self.r_perp0 {
            TeZero::Constant(r) => r,
            TeZero::Plasma { w } => plasma_te_zero(w, y),
        }
    }

    /// The TE value if it does not depend on `y`.
    pub fn constant_perp(&self) -> Option<f64> {
        match self.r_perp0 {
            TeZero::Constant(r) => Some(r),
            TeZero::Plasma { .. } => None,
        }
    }
}

/// `(√(y² + w²) − y) / (√(y² + w²) + y)` in stable form.
fn plasma_te_zero(w: f64, y: f64) -> f64 {
    let s = (y * y + w * w).sqrt();
    let d = s + y;
    if d == 0.0 {
        1.0
    } else {
        w * w / (d * d)
    }
}

/// `r₀ = (ε₀ − 1)/(ε₀ + 1)`.
pub fn r0(eps0: f64) -> f64 {
    (eps0 - 1.0) / (eps0 + 1.0)
}

/// Zero-frequency pair for `model`.
///
/// Ideal metal `(1, 1)`; Drude and dc-augmented `(1, 0)`; finite-ε₀ models
/// `(r₀, 0)`; plasma `(1, r_⊥(y))`, which needs the separation.
pub fn zero_freq_pair(
    model: &PermittivityModel,
    separation: Option<f64>,
) -> Result<ZeroFreqPair, ReflectionError> {
    let pair = |r_par0, te| ZeroFreqPair {
        r_par0,
        r_perp0: TeZero::Constant(te),
    };
    Ok(match model {
        PermittivityModel::IdealMetal => pair(1.0, 1.0),
        PermittivityModel::Drude(_) | PermittivityModel::DcAugmented(_) => pair(1.0, 0.0),
        PermittivityModel::Plasma(m) => {
            let a = separation.ok_or(ReflectionError::MissingSeparation)?;
            ZeroFreqPair {
                r_par0: 1.0,
                r_perp0: TeZero::Plasma {
                    w: 2.0 * a * m.plasma_frequency() / C,
                },
            }
        }
        PermittivityModel::Oscillator(_) | PermittivityModel::OpticalTable(_) => match static_eps(model) {
            StaticPermittivity::Finite(e) => pair(r0(e), 0.0),
            StaticPermittivity::Divergent => unreachable!("finite-static models"),
        },
    })
}
