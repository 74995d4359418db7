//! Classical steady state of the driven modes and the effective couplings
//! and detunings it induces.
//!
//! On this path `delta_m_tilde` and `delta_c_tilde` of [`SystemParams`] are
//! read as the detunings before the mechanical displacement shift; the
//! resolved parameters handed to the drift matrix carry the shifted values.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::feedback_rates;
use crate::params::{DriveParams, SystemParams};

pub const TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 1000;
pub const DAMPING: f64 = 0.5;
const EPS: f64 = 1e-30;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Effective detunings Δ̃_{m,BF} and Δ̃_{c,FB} entering the amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Detunings {
    pub magnon: f64,
    pub optical: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyAmplitudes {
    pub m_avg: Complex64,
    pub c_avg: Complex64,
    pub b1_avg: Complex64,
    pub b2_avg: Complex64,
    /// −i√2 𝒟_{mb1}⟨m⟩.
    pub g_m_eff: Complex64,
    /// i√2 𝒟_{cb2}⟨c⟩.
    pub g_c_eff: Complex64,
    pub delta_m_eff: f64,
    pub delta_c_eff: f64,
}

impl SteadyAmplitudes {
    fn as_array(&self) -> [Complex64; 4] {
        [self.m_avg, self.c_avg, self.b1_avg, self.b2_avg]
    }

    /// Largest `|Δz|/(|z| + ε)` over the four amplitudes.
    pub fn relative_change(&self, other: &SteadyAmplitudes) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm() / (a.norm() + EPS))
            .fold(0.0, f64::max)
    }
}

/// Detunings with no mechanical displacement: Δ_{m,BF} = Δ̃_m + Δ̂_B and
/// Δ_{c,FB} = Δ̃_c + 2γ_c𝓛 sin Θ.
pub fn bare_detunings(p: &SystemParams) -> Result<Detunings> {
    let fb = feedback_rates(p.gamma_c, p.reflectivity, p.theta)?;
    Ok(Detunings {
        magnon: p.delta_m_tilde + p.barnett_shift,
        optical: p.delta_c_tilde + fb.detuning_shift,
    })
}

fn nonzero(z: Complex64, what: &str) -> Result<Complex64> {
    if z.norm() > 0.0 && z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Singular(format!("denominator of {what} vanishes")))
    }
}

/// Evaluates the closed-form steady amplitudes once at fixed detunings.
pub fn amplitudes_once(
    p: &SystemParams,
    drives: &DriveParams,
    det: Detunings,
) -> Result<SteadyAmplitudes> {
    let fb = feedback_rates(p.gamma_c, p.reflectivity, p.theta)?;
    let psi = p.transmissivity();

    let cavity = nonzero(I * p.delta_a + p.gamma_a, "⟨m⟩ (microwave term)")?;
    let m_den = nonzero(I * det.magnon + p.gamma_m + p.d_ma * p.d_ma / cavity, "⟨m⟩")?;
    let m_avg = drives.rabi / m_den;

    let c_den = nonzero(Complex64::new(fb.damping, det.optical), "⟨c⟩")?;
    let c_avg = psi * drives.laser_coupling / c_den;

    let w1 = I * p.gamma_b1 - p.omega_b1;
    let w2 = I * p.gamma_b2 - p.omega_b2;
    let b_den = nonzero(p.d_b1b2 * p.d_b1b2 - w1 * w2, "⟨b1⟩, ⟨b2⟩")?;
    let pm = m_avg.norm_sqr() * drives.bare_d_mb1;
    let pc = c_avg.norm_sqr() * drives.bare_d_cb2;
    let b1_avg = (pc * p.d_b1b2 - pm * w2) / b_den;
    let b2_avg = (pc * w1 - pm * p.d_b1b2) / b_den;

    let s2 = std::f64::consts::SQRT_2;
    Ok(SteadyAmplitudes {
        m_avg,
        c_avg,
        b1_avg,
        b2_avg,
        g_m_eff: -I * s2 * drives.bare_d_mb1 * m_avg,
        g_c_eff: I * s2 * drives.bare_d_cb2 * c_avg,
        delta_m_eff: det.magnon,
        delta_c_eff: det.optical,
    })
}

/// Large-detuning forms ⟨m⟩ ≈ −iΩ/(Δ̃_m − 𝒟²_ma/Δ_a), ⟨c⟩ ≈ −iψ𝓔/Δ̃_c.
pub fn approximate_amplitudes(
    p: &SystemParams,
    drives: &DriveParams,
    det: Detunings,
) -> Result<(Complex64, Complex64)> {
    if p.delta_a == 0.0 || det.optical == 0.0 {
        return Err(Error::Singular(
            "approximate amplitudes need nonzero detunings".into(),
        ));
    }
    let m_den = det.magnon - p.d_ma * p.d_ma / p.delta_a;
    if m_den == 0.0 {
        return Err(Error::Singular(
            "denominator of approximate ⟨m⟩ vanishes".into(),
        ));
    }
    Ok((
        -I * drives.rabi / m_den,
        -I * p.transmissivity() * drives.laser_coupling / det.optical,
    ))
}

fn shifted(bare: Detunings, drives: &DriveParams, re_b1: f64, re_b2: f64) -> Detunings {
    Detunings {
        magnon: bare.magnon + 2.0 * drives.bare_d_mb1 * re_b1,
        optical: bare.optical - 2.0 * drives.bare_d_cb2 * re_b2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SelfConsistent {
    pub amplitudes: SteadyAmplitudes,
    pub iterations: usize,
    /// Relative amplitude change in the last iteration.
    pub residual: f64,
}

/// Damped fixed-point iteration on (Re⟨b1⟩, Re⟨b2⟩) from zero displacement.
pub fn solve_self_consistent(p: &SystemParams, drives: &DriveParams) -> Result<SelfConsistent> {
    p.validate()?;
    for (name, v) in [
        ("rabi", drives.rabi),
        ("laser_coupling", drives.laser_coupling),
        ("bare_D_mb1", drives.bare_d_mb1),
        ("bare_D_cb2", drives.bare_d_cb2),
    ] {
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "drive parameter {name} is not finite"
            )));
        }
    }
    let bare = bare_detunings(p)?;
    let (mut x1, mut x2) = (0.0, 0.0);
    let mut amps = amplitudes_once(p, drives, shifted(bare, drives, x1, x2))?;
    let mut residual = f64::INFINITY;
    for iterations in 1..=MAX_ITERATIONS {
        x1 += DAMPING * (amps.b1_avg.re - x1);
        x2 += DAMPING * (amps.b2_avg.re - x2);
        let next = amplitudes_once(p, drives, shifted(bare, drives, x1, x2))?;
        residual = next.relative_change(&amps);
        amps = next;
        if !residual.is_finite() {
            break;
        }
        if residual < TOLERANCE {
            return Ok(SelfConsistent {
                amplitudes: amps,
                iterations,
                residual,
            });
        }
    }
    Err(Error::MeanFieldDiverged {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Parameters for the drift matrix from a mean-field solution: effective
/// couplings from the real parts of 𝒟̂_m, 𝒟̂_c and detunings carrying the
/// displacement shift.
pub fn resolve(p: &SystemParams, amps: &SteadyAmplitudes) -> Result<SystemParams> {
    let fb = feedback_rates(p.gamma_c, p.reflectivity, p.theta)?;
    Ok(SystemParams {
        g_m: amps.g_m_eff.re,
        g_c: amps.g_c_eff.re,
        delta_m_tilde: amps.delta_m_eff - p.barnett_shift,
        delta_c_tilde: amps.delta_c_eff - fb.detuning_shift,
        ..p.clone()
    })
}
