//! Linearized fluctuation dynamics: drift matrix, diffusion matrix and the
//! feedback-modified optical rates.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::constants::{C_LIGHT, HBAR, K_B, MU_0};
use crate::error::{Error, Result};
use crate::params::{check_reflectivity, DriveParams, Mode, SystemParams};
use crate::scalar::{lit, Real};

pub const MODES: usize = 5;
pub const DIM: usize = 2 * MODES;

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)`.
pub fn thermal_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be ≥ 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    // expm1 keeps precision for x ≪ 1 and overflows to inf (giving 0) for large x.
    Ok(1.0 / x.exp_m1())
}

/// Optical rates after the coherent feedback loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeedbackRates {
    /// γ_c(1 − 2𝓛 cos Θ); may be negative.
    pub damping: f64,
    /// 2γ_c 𝓛 sin Θ, added to the optical detuning.
    pub detuning_shift: f64,
    /// ψ²|1 − 𝓛e^{iΘ}|², scaling the optical input noise.
    pub noise_factor: f64,
}

pub fn feedback_rates(gamma_c: f64, reflectivity: f64, theta: f64) -> Result<FeedbackRates> {
    check_reflectivity(reflectivity)?;
    let l = reflectivity;
    let psi_sq = 1.0 - l * l;
    let loop_gain = Complex64::new(1.0 - l * theta.cos(), -l * theta.sin());
    Ok(FeedbackRates {
        damping: gamma_c * (1.0 - 2.0 * l * theta.cos()),
        detuning_shift: 2.0 * gamma_c * l * theta.sin(),
        noise_factor: psi_sq * loop_gain.norm_sqr(),
    })
}

fn feedback(p: &SystemParams) -> FeedbackRates {
    // Reflectivity is range-checked by SystemParams::validate; fall back to the
    // raw formula so an out-of-range value still yields a matrix to inspect.
    feedback_rates(p.gamma_c, p.reflectivity, p.theta).unwrap_or_else(|_| {
        let l = p.reflectivity;
        FeedbackRates {
            damping: p.gamma_c * (1.0 - 2.0 * l * p.theta.cos()),
            detuning_shift: 2.0 * p.gamma_c * l * p.theta.sin(),
            noise_factor: (1.0 - l * l) * (1.0 - 2.0 * l * p.theta.cos() + l * l),
        }
    })
}

/// Row/column of the X quadrature of `mode`; Y follows at `+1`.
pub fn quadrature(mode: Mode) -> usize {
    2 * mode.index()
}

/// Drift matrix of the fluctuation quadratures in mode order (b1, b2, m, c, a).
pub fn build_drift<T: Real>(p: &SystemParams) -> DMatrix<T> {
    let fb = feedback(p);
    let s2g_m = std::f64::consts::SQRT_2 * p.g_m;
    let s2g_c = std::f64::consts::SQRT_2 * p.g_c;
    let delta_m = p.magnon_detuning();
    let delta_c = p.delta_c_tilde + fb.detuning_shift;
    let gamma_c = fb.damping;

    #[rustfmt::skip]
    let entries: [(usize, usize, f64); 32] = [
        (0, 0, -p.gamma_b1), (0, 1, p.omega_b1), (0, 3, p.d_b1b2),
        (1, 0, -p.omega_b1), (1, 1, -p.gamma_b1), (1, 2, -p.d_b1b2), (1, 5, -s2g_m),
        (2, 1, p.d_b1b2), (2, 2, -p.gamma_b2), (2, 3, p.omega_b2),
        (3, 0, -p.d_b1b2), (3, 2, -p.omega_b2), (3, 3, -p.gamma_b2), (3, 7, -s2g_c),
        (4, 0, s2g_m), (4, 4, -p.gamma_m), (4, 5, delta_m), (4, 9, p.d_ma),
        (5, 4, -delta_m), (5, 5, -p.gamma_m), (5, 8, -p.d_ma),
        (6, 2, s2g_c), (6, 6, -gamma_c), (6, 7, delta_c),
        (7, 6, -delta_c), (7, 7, -gamma_c),
        (8, 5, p.d_ma), (8, 8, -p.gamma_a), (8, 9, p.delta_a),
        (9, 4, -p.d_ma), (9, 8, -p.delta_a), (9, 9, -p.gamma_a),
    ];
    let mut a = DMatrix::<T>::zeros(DIM, DIM);
    for (i, j, v) in entries {
        a[(i, j)] = lit(v);
    }
    a
}

/// Diagonal diffusion matrix with thermal noise at each mode's resonance.
pub fn build_diffusion<T: Real>(p: &SystemParams) -> Result<DMatrix<T>> {
    let fb = feedback(p);
    let mut d = DMatrix::<T>::zeros(DIM, DIM);
    for mode in Mode::ALL {
        let n = thermal_occupancy(p.resonance(mode), p.temperature)?;
        let mut rate = p.damping(mode) * (2.0 * n + 1.0);
        if mode == Mode::C {
            rate *= fb.noise_factor;
        }
        let k = quadrature(mode);
        d[(k, k)] = lit(rate);
        d[(k + 1, k + 1)] = lit(rate);
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T: Real = f64> {
    pub drift: DMatrix<T>,
    pub diffusion: DMatrix<T>,
}

impl<T: Real> LinearModel<T> {
    pub fn new(p: &SystemParams) -> Result<Self> {
        p.validate()?;
        Ok(Self {
            drift: build_drift(p),
            diffusion: build_diffusion(p)?,
        })
    }

    pub const MODE_ORDER: [Mode; MODES] = Mode::ALL;
}

/// Drive amplitudes derived from powers and fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveAmplitudes {
    /// Ω = (√5/4) γ √N H_p.
    pub rabi: f64,
    /// 𝓔 = √(2γ_c P_L / ħω_{n2}).
    pub laser_coupling: f64,
    /// H_d = (1/R) √(2P₀μ₀/πc).
    pub drive_field: f64,
}

/// Microwave drive field amplitude at the sphere from the drive power.
pub fn drive_field_from_power(power: f64, radius: f64) -> Result<f64> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::Domain(format!(
            "drive power must be ≥ 0, got {power}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "sphere radius must be positive, got {radius}"
        )));
    }
    Ok((2.0 * power * MU_0 / (std::f64::consts::PI * C_LIGHT)).sqrt() / radius)
}

/// Evaluates Ω from the stored `drive_field`, 𝓔 from the laser power and the
/// field H_d implied by the microwave power.
pub fn drive_conversions(drive: &DriveParams, gamma_c: f64) -> Result<DriveAmplitudes> {
    let nonneg = [
        ("spin_count", drive.spin_count),
        ("gyromagnetic_ratio", drive.gyromagnetic_ratio),
        ("drive_field", drive.drive_field),
        ("laser_power", drive.laser_power),
    ];
    for (name, v) in nonneg {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be ≥ 0, got {v}")));
        }
    }
    if !(gamma_c > 0.0) {
        return Err(Error::Domain(format!(
            "gamma_c must be positive, got {gamma_c}"
        )));
    }
    if !(drive.drive_freq_2 > 0.0) {
        return Err(Error::Domain(format!(
            "laser frequency must be positive, got {}",
            drive.drive_freq_2
        )));
    }
    let rabi =
        5f64.sqrt() / 4.0 * drive.gyromagnetic_ratio * drive.spin_count.sqrt() * drive.drive_field;
    let laser_coupling = (2.0 * gamma_c * drive.laser_power / (HBAR * drive.drive_freq_2)).sqrt();
    let drive_field = drive_field_from_power(drive.drive_power, drive.sphere_radius)?;
    Ok(DriveAmplitudes {
        rabi,
        laser_coupling,
        drive_field,
    })
}
