//! Thermal Casimir free energy, pressure and entropy between two plates from
//! the Lifshitz formula, with low- and high-temperature asymptotics and
//! Nernst heat theorem checks.

pub mod analysis;
pub mod asymptotics;
pub mod constants;
pub mod lifshitz;
pub mod materials;
pub mod numdiff;
pub mod quadrature;
pub mod reflection;
pub mod specfun;

pub use analysis::{compare_asymptotic, nernst_check, Comparison, EntropyFit, LogLogFit, NernstReport, Verdict};
pub use asymptotics::{AsymptoticError, AsymptoticResult, ConfigKind, Quantity, StaticPair, Validity};
pub use lifshitz::{
    entropy, free_energy, matsubara_frequency, pressure, thermal_correction, zero_temperature_energy,
    zero_temperature_pressure, Diagnostics, Evaluated, LifshitzError, NumericalSettings, PlateConfiguration,
    ThermalCorrection, ThermalQuantities,
};
pub use materials::{eval_eps, static_eps, MaterialError, PermittivityModel, StaticPermittivity};
pub use reflection::{r_te, r_tm, zero_freq_pair, DimensionlessPoint, ZeroFreqPair};
