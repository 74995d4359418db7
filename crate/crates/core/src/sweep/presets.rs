//! Shipped sweeps reproducing the published figure families. Every parameter
//! a preset does not sweep or name stays at [`SystemParams::baseline`].

use super::SweepSpec;
use crate::error::{Error, Result};
use crate::params::SystemParams;

const WB1: f64 = 20.15e6;
const WB2: f64 = 20.11e6;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Result<SweepSpec>,
}

impl Preset {
    pub fn spec(&self) -> Result<SweepSpec> {
        (self.build)()
    }
}

impl std::fmt::Debug for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Preset").field("name", &self.name).finish()
    }
}

fn with(reflectivity: f64, barnett_over_wb1: f64) -> SweepSpec {
    let mut p = SystemParams::baseline();
    p.reflectivity = reflectivity;
    p.barnett_shift = barnett_over_wb1 * p.omega_b1;
    SweepSpec::new(p)
}

fn detuning_grid(l: f64, b: f64) -> Result<SweepSpec> {
    with(l, b)
        .with_axis("delta_m_tilde", -2.0 * WB1, 2.0 * WB1, 40)?
        .with_axis("delta_c_tilde", -2.0 * WB2, 2.0 * WB2, 40)
}

fn coupling_grid(l: f64, b: f64) -> Result<SweepSpec> {
    with(l, b)
        .with_axis("D_ma", 0.0, 3e6, 40)?
        .with_axis("D_b1b2", 0.0, 3e6, 40)
}

fn temperature_scan(l: f64, b: f64) -> Result<SweepSpec> {
    with(l, b).with_axis("temperature", 0.0, 0.5, 51)
}

fn tripartite(l: f64) -> Result<SweepSpec> {
    with(l, 0.0)
        .with_axis("temperature", 0.0, 1.0, 51)?
        .with_axis("barnett_shift", -0.2 * WB1, 0.2 * WB1, 3)
}

fn contrast_vs_detuning(l: f64) -> Result<SweepSpec> {
    let mut s = with(l, 0.0)
        .with_axis("delta_m_tilde", -2.0 * WB1, 2.0 * WB1, 81)?
        .with_axis("barnett_shift", 0.1 * WB1, 0.3 * WB1, 3)?;
    s.nonreciprocity = true;
    Ok(s)
}

static PRESETS: &[Preset] = &[
    Preset {
        name: "baseline",
        description: "single point at the reference parameters",
        build: || Ok(with(0.0, 0.0)),
    },
    Preset {
        name: "fig2",
        description: "Fig. 2: entanglement vs (Δ̃_m, Δ̃_c) over ±2ω_b, 𝓛 = Δ̂_B = 0",
        build: || detuning_grid(0.0, 0.0),
    },
    Preset {
        name: "fig3",
        description: "Fig. 3: entanglement vs (Δ̃_m, Δ̃_c), 𝓛 = 0.9, Δ̂_B = 0",
        build: || detuning_grid(0.9, 0.0),
    },
    Preset {
        name: "fig4",
        description: "Fig. 4: entanglement vs (Δ̃_m, Δ̃_c), 𝓛 = 0.9, Δ̂_B = 0.2ω_b1",
        build: || detuning_grid(0.9, 0.2),
    },
    Preset {
        name: "fig5",
        description: "Fig. 5: entanglement vs (Θ, 𝓛), Δ̂_B = 0.2ω_b1",
        build: || {
            let pi = std::f64::consts::PI;
            with(0.0, 0.2)
                .with_axis("theta", -pi, pi, 40)?
                .with_axis("reflectivity", 0.0, 0.9, 40)
        },
    },
    Preset {
        name: "fig6",
        description: "Fig. 6: entanglement vs (𝒟_ma, 𝒟_b1b2) over 0–3 MHz, 𝓛 = Δ̂_B = 0",
        build: || coupling_grid(0.0, 0.0),
    },
    Preset {
        name: "fig7",
        description: "Fig. 7: entanglement vs (𝒟_ma, 𝒟_b1b2), 𝓛 = 0.9, Δ̂_B = 0.2ω_b1",
        build: || coupling_grid(0.9, 0.2),
    },
    Preset {
        name: "fig8",
        description: "Fig. 8: entanglement and steering vs T over 0–0.5 K, 𝓛 = Δ̂_B = 0",
        build: || temperature_scan(0.0, 0.0),
    },
    Preset {
        name: "fig9",
        description: "Fig. 9: entanglement and steering vs T, 𝓛 = 0.9, Δ̂_B = 0",
        build: || temperature_scan(0.9, 0.0),
    },
    Preset {
        name: "fig10",
        description: "Fig. 10: entanglement and steering vs T, 𝓛 = 0.9, Δ̂_B = 0.2ω_b1",
        build: || temperature_scan(0.9, 0.2),
    },
    Preset {
        name: "fig11",
        description: "Fig. 11: entanglement vs (T, Δ̂_B) over 0–1 K and ±0.3ω_b1, 𝓛 = 0.9",
        build: || {
            with(0.9, 0.0)
                .with_axis("temperature", 0.0, 1.0, 51)?
                .with_axis("barnett_shift", -0.3 * WB1, 0.3 * WB1, 7)
        },
    },
    Preset {
        name: "fig12-l0",
        description: "Fig. 12(a–c): residual contangles vs (T, Δ̂_B ∈ {−0.2, 0, 0.2}ω_b1), 𝓛 = 0",
        build: || tripartite(0.0),
    },
    Preset {
        name: "fig12-l09",
        description: "Fig. 12(d–f): residual contangles vs (T, Δ̂_B ∈ {−0.2, 0, 0.2}ω_b1), 𝓛 = 0.9",
        build: || tripartite(0.9),
    },
    Preset {
        name: "fig13",
        description: "Fig. 13: contrast ratios vs Δ̃_m for |Δ̂_B| ∈ {0.1, 0.2, 0.3}ω_b1, 𝓛 = 0.6",
        build: || contrast_vs_detuning(0.6),
    },
    Preset {
        name: "fig14",
        description: "Fig. 14: contrast ratios vs Δ̃_m for |Δ̂_B| ∈ {0.1, 0.2, 0.3}ω_b1, 𝓛 = 0.9",
        build: || contrast_vs_detuning(0.9),
    },
    Preset {
        name: "fig15",
        description: "Fig. 15: contrast ratios vs T over 0–1 K, 𝓛 = 0.9, |Δ̂_B| = 0.2ω_b1",
        build: || {
            let mut s = with(0.9, 0.2).with_axis("temperature", 0.0, 1.0, 51)?;
            s.nonreciprocity = true;
            Ok(s)
        },
    },
    Preset {
        name: "fig16",
        description: "Fig. 16: tripartite contrast vs T for 𝓛 ∈ {0, 0.1}, |Δ̂_B| = 0.2ω_b1",
        build: || {
            let mut s = with(0.0, 0.2)
                .with_axis("temperature", 0.0, 1.0, 51)?
                .with_axis("reflectivity", 0.0, 0.1, 2)?;
            s.nonreciprocity = true;
            Ok(s)
        },
    },
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

pub fn preset(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        Error::Config(format!(
            "unknown preset `{name}` (available: {})",
            names.join(", ")
        ))
    })
}
