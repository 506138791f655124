//! Physical constants (CODATA 2018, SI units).

/// Reduced Planck constant ħ in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum in m/s.
pub const C: f64 = 299_792_458.0;

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Riemann ζ(3) (Apéry's constant).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// ζ(2) = π²/6.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
