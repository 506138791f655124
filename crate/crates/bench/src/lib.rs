//! Fixtures shared by the benchmarks.

use casimir_core::lifshitz::{NumericalSettings, PlateConfiguration};
use casimir_core::materials::preset;

/// Two identical static silicon plates.
pub fn si_si(separation: f64, temperature: f64) -> PlateConfiguration {
    plates("Si-static", "Si-static", separation, temperature)
}

/// Static silicon facing static silica.
pub fn si_sio2(separation: f64, temperature: f64) -> PlateConfiguration {
    plates("Si-static", "SiO2-static", separation, temperature)
}

pub fn plates(m1: &str, m2: &str, separation: f64, temperature: f64) -> PlateConfiguration {
    PlateConfiguration::new(
        preset(m1).expect("preset exists"),
        preset(m2).expect("preset exists"),
        separation,
        temperature,
    )
    .expect("valid configuration")
}

pub fn settings() -> NumericalSettings {
    NumericalSettings::default()
}
