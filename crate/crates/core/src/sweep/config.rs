//! Flat TOML run configuration.
//!
//! ```toml
//! preset = "fig8"                 # optional starting point
//! coupling_mode = "direct"        # or "mean-field"
//! measures = ["entanglement", "steering", "contangle", "phonons"]
//! nonreciprocity = false
//! temperature = 0.0               # any registry parameter, config units
//!
//! [axis1]
//! param = "delta_m_tilde"
//! start = -40.3e6
//! stop = 40.3e6
//! count = 40
//!
//! [drives]                        # mean-field only
//! drive_power = 4e-3
//! ```

use serde::Deserialize;
use toml::Value;

use super::{presets, Axis, SweepSpec};
use crate::error::{Error, Result};
use crate::measures::MeasureKind;
use crate::params::{hz, lookup, DriveParams, SystemParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Effective couplings G_m, G_c taken as given.
    #[default]
    Direct,
    /// Effective couplings and detuning shifts from the mean-field solve.
    MeanField,
}

/// Drive settings for the mean-field path; unset fields take the defaults of
/// [`DriveParams::baseline`]. Bare couplings are quoted as value/2π in Hz.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub drive_power: Option<f64>,
    pub laser_power: Option<f64>,
    pub sphere_radius: Option<f64>,
    #[serde(rename = "bare_D_mb1")]
    pub bare_d_mb1: Option<f64>,
    #[serde(rename = "bare_D_cb2")]
    pub bare_d_cb2: Option<f64>,
}

impl DriveConfig {
    pub fn resolve(&self, params: &SystemParams) -> DriveParams {
        DriveParams::from_powers(
            params,
            self.drive_power.unwrap_or(4e-3),
            self.laser_power.unwrap_or(30e-3),
            self.sphere_radius.unwrap_or(100e-6),
            hz(self.bare_d_mb1.unwrap_or(0.1)),
            hz(self.bare_d_cb2.unwrap_or(100.0)),
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisConfig {
    param: String,
    start: f64,
    stop: f64,
    count: usize,
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::Config(format!("`{key}` must be a number"))),
    }
}

fn typed<'de, T: Deserialize<'de>>(key: &str, v: Value) -> Result<T> {
    v.try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("`{key}`: {}", e.message())))
}

/// Parses a configuration. Unknown keys and parameter names are rejected here,
/// before any evaluation.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    parse_config_with(text, None)
}

/// As [`parse_config`], starting from `preset` when the text names none.
pub fn parse_config_with(text: &str, preset: Option<&str>) -> Result<SweepSpec> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;

    let mut spec = match (table.remove("preset"), preset) {
        (Some(Value::String(name)), _) => presets::preset(&name)?.spec()?,
        (Some(_), _) => return Err(Error::Config("`preset` must be a string".into())),
        (None, Some(name)) => presets::preset(name)?.spec()?,
        (None, None) => SweepSpec::new(SystemParams::baseline()),
    };

    if let Some(v) = table.remove("coupling_mode") {
        spec.eval.coupling = typed("coupling_mode", v)?;
    }
    if let Some(v) = table.remove("measures") {
        let mut kinds: Vec<MeasureKind> = typed("measures", v)?;
        kinds.sort();
        kinds.dedup();
        spec.eval.measures = kinds;
    }
    if let Some(v) = table.remove("nonreciprocity") {
        spec.nonreciprocity = typed("nonreciprocity", v)?;
    }
    if let Some(v) = table.remove("drives") {
        spec.eval.drives = typed("drives", v)?;
    }
    let mut axes = Vec::new();
    for key in ["axis1", "axis2"] {
        if let Some(v) = table.remove(key) {
            let a: AxisConfig = typed(key, v)?;
            axes.push(Axis::new(&a.param, a.start, a.stop, a.count)?);
        }
    }
    if !axes.is_empty() {
        spec.axes = axes;
    }
    for (key, v) in &table {
        lookup(key).map_err(|_| Error::Config(format!("unknown configuration key `{key}`")))?;
        spec.base.set(key, number(key, v)?)?;
    }
    spec.check()?;
    Ok(spec)
}
