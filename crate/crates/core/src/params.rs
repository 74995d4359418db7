//! Physical parameters of the five-mode system.
//!
//! Everything here is stored in SI units with angular frequencies in rad/s.
//! Configuration files quote frequencies as `value/2π` in Hz; [`Unit`] and the
//! parameter registry handle that conversion in one place.

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, TWO_PI, YIG_GYROMAGNETIC_HZ_PER_T, YIG_SPIN_DENSITY};
use crate::error::{Error, Result};

/// Modes in drift-matrix order. Each mode owns the quadrature pair
/// `(X, Y)` at rows `2·index` and `2·index + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    B1,
    B2,
    M,
    C,
    A,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::B1, Mode::B2, Mode::M, Mode::C, Mode::A];
    pub const MECHANICAL: [Mode; 2] = [Mode::B1, Mode::B2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::B1 => "b1",
            Mode::B2 => "b2",
            Mode::M => "m",
            Mode::C => "c",
            Mode::A => "a",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Microwave cavity resonance.
    pub omega_a: f64,
    /// Magnon (Kittel mode) resonance.
    pub omega_m: f64,
    pub omega_b1: f64,
    pub omega_b2: f64,
    pub gamma_a: f64,
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub gamma_b1: f64,
    pub gamma_b2: f64,
    /// Magnon–microwave beam-splitter coupling.
    #[serde(rename = "D_ma")]
    pub d_ma: f64,
    /// Phonon–phonon beam-splitter coupling.
    #[serde(rename = "D_b1b2")]
    pub d_b1b2: f64,
    /// Effective magnomechanical coupling.
    #[serde(rename = "G_m")]
    pub g_m: f64,
    /// Effective optomechanical coupling.
    #[serde(rename = "G_c")]
    pub g_c: f64,
    pub delta_m_tilde: f64,
    pub delta_c_tilde: f64,
    pub delta_a: f64,
    /// Signed magnon frequency shift from rotating the YIG sphere.
    pub barnett_shift: f64,
    /// Feedback beam-splitter reflectivity.
    pub reflectivity: f64,
    /// Feedback output-field phase, radians.
    pub theta: f64,
    /// Bath temperature, kelvin.
    pub temperature: f64,
    /// Optical resonance wavelength, metres.
    pub lambda_c: f64,
}

/// Angular frequency from a frequency quoted in Hz.
pub fn hz(f: f64) -> f64 {
    TWO_PI * f
}

impl SystemParams {
    /// Experimentally motivated operating point: ω_{a,m}/2π = 10 GHz,
    /// ω_{b1}/2π = 20.15 MHz, ω_{b2}/2π = 20.11 MHz, γ_{a,m,c}/2π = 1 MHz,
    /// γ_{b1,b2}/2π = 100 Hz, effective couplings 0.7 and 2.7 MHz, beam-splitter
    /// couplings 1.5 and 2.4 MHz, T = 10 mK, magnon on the blue and optics on
    /// the red mechanical sideband, microwave cavity resonant with the magnon.
    pub fn baseline() -> Self {
        let omega_b1 = hz(20.15e6);
        let omega_b2 = hz(20.11e6);
        Self {
            omega_a: hz(10e9),
            omega_m: hz(10e9),
            omega_b1,
            omega_b2,
            gamma_a: hz(1e6),
            gamma_m: hz(1e6),
            gamma_c: hz(1e6),
            gamma_b1: hz(100.0),
            gamma_b2: hz(100.0),
            d_ma: hz(1.5e6),
            d_b1b2: hz(2.4e6),
            g_m: hz(0.7e6),
            g_c: hz(2.7e6),
            delta_m_tilde: -omega_b1,
            delta_c_tilde: omega_b2,
            delta_a: -omega_b1,
            barnett_shift: 0.0,
            reflectivity: 0.0,
            theta: 0.0,
            temperature: 0.01,
            lambda_c: 1550e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_a", self.omega_a),
            ("omega_m", self.omega_m),
            ("omega_b1", self.omega_b1),
            ("omega_b2", self.omega_b2),
            ("gamma_a", self.gamma_a),
            ("gamma_m", self.gamma_m),
            ("gamma_c", self.gamma_c),
            ("gamma_b1", self.gamma_b1),
            ("gamma_b2", self.gamma_b2),
            ("lambda_c", self.lambda_c),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("D_ma", self.d_ma),
            ("D_b1b2", self.d_b1b2),
            ("G_m", self.g_m),
            ("G_c", self.g_c),
            ("delta_m_tilde", self.delta_m_tilde),
            ("delta_c_tilde", self.delta_c_tilde),
            ("delta_a", self.delta_a),
            ("barnett_shift", self.barnett_shift),
            ("theta", self.theta),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain(format!(
                "temperature must be finite and ≥ 0, got {}",
                self.temperature
            )));
        }
        check_reflectivity(self.reflectivity)
    }

    /// Squared transmissivity ψ² = 1 − 𝓛².
    pub fn transmissivity_sq(&self) -> f64 {
        1.0 - self.reflectivity * self.reflectivity
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity_sq().sqrt()
    }

    /// Optical resonance ω_c = 2πc/λ_c.
    pub fn omega_c(&self) -> f64 {
        TWO_PI * C_LIGHT / self.lambda_c
    }

    /// Magnon detuning including the Barnett shift.
    pub fn magnon_detuning(&self) -> f64 {
        self.delta_m_tilde + self.barnett_shift
    }

    /// Resonance frequency used for the thermal occupation of `mode`.
    pub fn resonance(&self, mode: Mode) -> f64 {
        match mode {
            Mode::B1 => self.omega_b1,
            Mode::B2 => self.omega_b2,
            Mode::M => self.omega_m,
            Mode::C => self.omega_c(),
            Mode::A => self.omega_a,
        }
    }

    pub fn damping(&self, mode: Mode) -> f64 {
        match mode {
            Mode::B1 => self.gamma_b1,
            Mode::B2 => self.gamma_b2,
            Mode::M => self.gamma_m,
            Mode::C => self.gamma_c,
            Mode::A => self.gamma_a,
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        let spec = lookup(name)?;
        Ok(spec.unit.to_config(*(spec.field)(&mut self.clone())))
    }

    /// Sets a parameter from a value quoted in configuration units.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let spec = lookup(name)?;
        *(spec.field)(self) = spec.unit.from_config(value);
        Ok(())
    }
}

pub(crate) fn check_reflectivity(l: f64) -> Result<()> {
    if (0.0..1.0).contains(&l) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "reflectivity must lie in [0, 1), got {l}"
        )))
    }
}

/// How a parameter is quoted in configuration files and output headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    /// Angular frequency, quoted as `value/2π` in Hz.
    AngularHz,
    Kelvin,
    Radian,
    Dimensionless,
    Metre,
}

impl Unit {
    pub fn from_config(self, v: f64) -> f64 {
        match self {
            Unit::AngularHz => hz(v),
            _ => v,
        }
    }

    pub fn to_config(self, v: f64) -> f64 {
        match self {
            Unit::AngularHz => v / TWO_PI,
            _ => v,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Unit::AngularHz => "Hz",
            Unit::Kelvin => "K",
            Unit::Radian => "rad",
            Unit::Dimensionless => "1",
            Unit::Metre => "m",
        }
    }
}

pub struct ParamSpec {
    pub name: &'static str,
    pub unit: Unit,
    field: fn(&mut SystemParams) -> &mut f64,
}

impl std::fmt::Debug for ParamSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSpec")
            .field("name", &self.name)
            .field("unit", &self.unit)
            .finish()
    }
}

macro_rules! registry {
    ($($name:literal => $field:ident : $unit:ident),* $(,)?) => {
        /// Every sweepable parameter, by canonical name.
        pub static PARAMETERS: &[ParamSpec] = &[
            $(ParamSpec { name: $name, unit: Unit::$unit, field: |p| &mut p.$field },)*
        ];
    };
}

registry! {
    "omega_a" => omega_a: AngularHz,
    "omega_m" => omega_m: AngularHz,
    "omega_b1" => omega_b1: AngularHz,
    "omega_b2" => omega_b2: AngularHz,
    "gamma_a" => gamma_a: AngularHz,
    "gamma_m" => gamma_m: AngularHz,
    "gamma_c" => gamma_c: AngularHz,
    "gamma_b1" => gamma_b1: AngularHz,
    "gamma_b2" => gamma_b2: AngularHz,
    "D_ma" => d_ma: AngularHz,
    "D_b1b2" => d_b1b2: AngularHz,
    "G_m" => g_m: AngularHz,
    "G_c" => g_c: AngularHz,
    "delta_m_tilde" => delta_m_tilde: AngularHz,
    "delta_c_tilde" => delta_c_tilde: AngularHz,
    "delta_a" => delta_a: AngularHz,
    "barnett_shift" => barnett_shift: AngularHz,
    "reflectivity" => reflectivity: Dimensionless,
    "theta" => theta: Radian,
    "temperature" => temperature: Kelvin,
    "lambda_c" => lambda_c: Metre,
}

pub fn lookup(name: &str) -> Result<&'static ParamSpec> {
    PARAMETERS.iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<_> = PARAMETERS.iter().map(|p| p.name).collect();
        Error::Config(format!(
            "unknown parameter `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

/// Drive fields and bare couplings, needed only when the effective couplings
/// are derived from mean-field amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Rabi frequency Ω of the microwave drive on the magnon, rad/s.
    pub rabi: f64,
    /// Laser drive amplitude 𝓔 on the optical mode, s⁻¹.
    pub laser_coupling: f64,
    /// Bare magnomechanical coupling, rad/s.
    #[serde(rename = "bare_D_mb1")]
    pub bare_d_mb1: f64,
    /// Bare optomechanical coupling, rad/s.
    #[serde(rename = "bare_D_cb2")]
    pub bare_d_cb2: f64,
    pub spin_count: f64,
    /// Gyromagnetic ratio, rad/(s·T).
    pub gyromagnetic_ratio: f64,
    /// Amplitude of the magnon drive field, tesla.
    pub drive_field: f64,
    /// Microwave drive power, watts.
    pub drive_power: f64,
    /// Laser power, watts.
    pub laser_power: f64,
    /// YIG sphere radius, metres.
    pub sphere_radius: f64,
    pub drive_freq_1: f64,
    pub drive_freq_2: f64,
}

impl DriveParams {
    /// Drives matching [`SystemParams::baseline`]: P₀ = 4 mW on a 100 μm-radius
    /// YIG sphere, P_L = 30 mW, bare couplings 0.1 Hz and 100 Hz.
    pub fn baseline(params: &SystemParams) -> Self {
        Self::from_powers(params, 4e-3, 30e-3, 100e-6, hz(0.1), hz(100.0))
    }

    /// Fills in N, H_d, Ω and 𝓔 from powers and sphere size. Drive tones sit
    /// at ω_m − Δ̃_m and ω_c − Δ̃_c.
    pub fn from_powers(
        params: &SystemParams,
        drive_power: f64,
        laser_power: f64,
        sphere_radius: f64,
        bare_d_mb1: f64,
        bare_d_cb2: f64,
    ) -> Self {
        let volume = 4.0 / 3.0 * std::f64::consts::PI * sphere_radius.powi(3);
        let mut drives = Self {
            rabi: 0.0,
            laser_coupling: 0.0,
            bare_d_mb1,
            bare_d_cb2,
            spin_count: YIG_SPIN_DENSITY * volume,
            gyromagnetic_ratio: hz(YIG_GYROMAGNETIC_HZ_PER_T),
            drive_field: 0.0,
            drive_power,
            laser_power,
            sphere_radius,
            drive_freq_1: params.omega_m - params.delta_m_tilde,
            drive_freq_2: params.omega_c() - params.delta_c_tilde,
        };
        drives.drive_field =
            crate::model::drive_field_from_power(drive_power, sphere_radius).unwrap_or(f64::NAN);
        if let Ok(conv) = crate::model::drive_conversions(&drives, params.gamma_c) {
            drives.rabi = conv.rabi;
            drives.laser_coupling = conv.laser_coupling;
        } else {
            drives.rabi = f64::NAN;
            drives.laser_coupling = f64::NAN;
        }
        drives
    }
}
