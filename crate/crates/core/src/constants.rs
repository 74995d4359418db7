//! Physical constants (CODATA 2018 exact or recommended values) and material defaults.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum magnetic permeability, N/A².
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

/// Electron gyromagnetic ratio γ/2π used for YIG, Hz/T.
pub const YIG_GYROMAGNETIC_HZ_PER_T: f64 = 28.0e9;
/// Net spin density of YIG, m⁻³.
pub const YIG_SPIN_DENSITY: f64 = 4.22e27;

pub const TWO_PI: f64 = std::f64::consts::TAU;
