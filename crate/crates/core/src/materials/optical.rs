//! Tabulated absorption data mapped to the imaginary axis.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::MaterialError;
use crate::quadrature::{integrate, Tolerance};

/// Share of `ε(iξ) − 1` a missing tail may carry before evaluation fails.
const TAIL_WARN_FRACTION: f64 = 0.01;

/// Extrapolation of `ε″(ω)` outside the tabulated range.
///
/// `PowerLaw(p)` continues the edge value as `ε″_edge · (ω/ω_edge)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    None,
    Constant,
    PowerLaw(f64),
}

impl TailModel {
    pub const DEFAULT_LOW: TailModel = TailModel::PowerLaw(1.0);
    pub const DEFAULT_HIGH: TailModel = TailModel::PowerLaw(-3.0);

    fn exponent(self) -> Option<f64> {
        match self {
            TailModel::None => None,
            TailModel::Constant => Some(0.0),
            TailModel::PowerLaw(p) => Some(p),
        }
    }
}

/// Samples of `ε″(ω)` on a strictly increasing grid of real frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalDataTable {
    omega: Vec<f64>,
    eps2: Vec<f64>,
}

impl OpticalDataTable {
    pub fn new(omega: Vec<f64>, eps2: Vec<f64>) -> Result<Self, MaterialError> {
        if omega.len() != eps2.len() {
            return Err(MaterialError::Invalid(format!(
                "{} frequencies but {} eps2 values",
                omega.len(),
                eps2.len()
            )));
        }
        if omega.len() < 8 {
            return Err(MaterialError::Invalid("optical table needs at least 8 rows".into()));
        }
        if let Some(&w) = omega.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(MaterialError::Domain {
                what: "tabulated frequency",
                constraint: "omega > 0 rad/s",
                value: w,
            });
        }
        if omega.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MaterialError::Invalid(
                "optical table frequencies must be strictly increasing".into(),
            ));
        }
        if let Some(&e) = eps2.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(MaterialError::Domain {
                what: "tabulated eps2",
                constraint: "eps2 >= 0",
                value: e,
            });
        }
        Ok(Self { omega, eps2 })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn eps2(&self) -> &[f64] {
        &self.eps2
    }
}

/// Table plus tail descriptors, with `ε₀` cached at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalTableModel {
    table: OpticalDataTable,
    low_tail: TailModel,
    high_tail: TailModel,
    #[serde(skip)]
    eps0: f64,
}

impl OpticalTableModel {
    pub fn new(
        table: OpticalDataTable,
        low_tail: TailModel,
        high_tail: TailModel,
    ) -> Result<Self, MaterialError> {
        if let Some(p) = low_tail.exponent() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(MaterialError::Invalid(format!(
                    "low-frequency tail exponent must be > 0 for a finite static permittivity, got {p}"
                )));
            }
        }
        if let Some(p) = high_tail.exponent() {
            if !(p < 0.0 && p.is_finite()) {
                return Err(MaterialError::Invalid(format!(
                    "high-frequency tail exponent must be < 0 for a convergent transform, got {p}"
                )));
            }
        }
        let eps0 = kk_to_imaginary_axis(&table, 0.0, low_tail, high_tail)?;
        Ok(Self {
            table,
            low_tail,
            high_tail,
            eps0,
        })
    }

    pub fn table(&self) -> &OpticalDataTable {
        &self.table
    }

    pub fn tails(&self) -> (TailModel, TailModel) {
        (self.low_tail, self.high_tail)
    }

    pub fn static_eps(&self) -> f64 {
        self.eps0
    }

    pub fn eval(&self, xi: f64) -> Result<f64, MaterialError> {
        kk_to_imaginary_axis(&self.table, xi, self.low_tail, self.high_tail)
    }
}

/// `ε(iξ) = 1 + (2/π) ∫₀^∞ ω ε″(ω) / (ω² + ξ²) dω`.
///
/// The tabulated range is integrated by the trapezoid rule in `ln ω`; the
/// tails are integrated analytically-transformed with adaptive quadrature.
/// A `None` tail contributes nothing, but if the default extrapolation would
/// have carried more than 1% of `ε − 1` the call fails.
pub fn kk_to_imaginary_axis(
    table: &OpticalDataTable,
    xi: f64,
    low_tail: TailModel,
    high_tail: TailModel,
) -> Result<f64, MaterialError> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(MaterialError::Domain {
            what: "imaginary frequency xi",
            constraint: "xi >= 0 rad/s",
            value: xi,
        });
    }
    let w = &table.omega;
    let e = &table.eps2;
    let g = |i: usize| {
        let w2 = w[i] * w[i];
        w2 * e[i] / (w2 + xi * xi)
    };
    let mut body = 0.0;
    for i in 1..w.len() {
        body += 0.5 * (g(i - 1) + g(i)) * (w[i] / w[i - 1]).ln();
    }

    let n = w.len() - 1;
    let low = |p: f64| -> Result<f64, MaterialError> {
        if e[0] == 0.0 {
            return Ok(0.0);
        }
        Ok(e[0] * low_tail_integral(p, xi / w[0])?)
    };
    let high = |p: f64| -> Result<f64, MaterialError> {
        if e[n] == 0.0 {
            return Ok(0.0);
        }
        Ok(e[n] * high_tail_integral(p, xi / w[n])?)
    };

    let low_part = match low_tail.exponent() {
        Some(p) => low(p)?,
        None => 0.0,
    };
    let high_part = match high_tail.exponent() {
        Some(p) => high(p)?,
        None => 0.0,
    };
    let total = body + low_part + high_part;

    for (side, tail, estimate) in [
        ("low-frequency", low_tail, TailModel::DEFAULT_LOW),
        ("high-frequency", high_tail, TailModel::DEFAULT_HIGH),
    ] {
        if tail != TailModel::None {
            continue;
        }
        let p = estimate.exponent().expect("default tails are power laws");
        let guess = if side == "low-frequency" { low(p)? } else { high(p)? };
        let fraction = guess / (total + guess);
        if guess > 0.0 && fraction > TAIL_WARN_FRACTION {
            return Err(MaterialError::TailUnderspecified { side, fraction, xi });
        }
    }
    Ok(1.0 + 2.0 / PI * total)
}

/// `∫₀¹ s^{p+1} / (s² + x²) ds` for `p > 0`, via `v = s^p`.
fn low_tail_integral(p: f64, x: f64) -> Result<f64, MaterialError> {
    if x == 0.0 {
        return Ok(1.0 / p);
    }
    let k = 2.0 / p;
    let x2 = x * x;
    let f = |v: f64| {
        let s2 = v.powf(k);
        s2 / (s2 + x2)
    };
    Ok(unit_integral(f, x.powf(p))? / p)
}

/// `∫₁^∞ s^{p+1} / (s² + x²) ds` for `p < 0`, via `s = 1/t`, `v = t^{−p}`.
fn high_tail_integral(p: f64, x: f64) -> Result<f64, MaterialError> {
    let q = -p;
    if x == 0.0 {
        return Ok(1.0 / q);
    }
    let k = 2.0 / q;
    let x2 = x * x;
    let f = |v: f64| 1.0 / (1.0 + x2 * v.powf(k));
    Ok(unit_integral(f, x.powf(p))? / q)
}

/// Integral over `[0, 1]` with breakpoints clustered around the transition `vc`.
fn unit_integral<F: Fn(f64) -> f64>(f: F, vc: f64) -> Result<f64, MaterialError> {
    let mut pts = vec![0.0];
    for m in [1.0 / 64.0, 1.0 / 8.0, 1.0, 8.0] {
        let v = vc * m;
        if v > 0.0 && v < 1.0 && v > *pts.last().unwrap() {
            pts.push(v);
        }
    }
    pts.push(1.0);
    Ok(integrate(f, &pts, Tolerance::relative(1e-12))?.value)
}
