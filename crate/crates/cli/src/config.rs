//! JSON run configuration.
//!
//! Every section is optional except `schema`. Sections that accept a preset
//! take either a preset name or an object whose `preset` field (or the
//! section default) supplies the base values that the other fields override.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use heliomech_core::constants::SPEED_OF_LIGHT;
use heliomech_core::material::dielectric_constant;
use heliomech_core::modes::{box_mode, grid_mode, uniform_mode};
use heliomech_core::oracle::OracleSettings;
use heliomech_core::presets::{self, CavityPreset};
use heliomech_core::{FluidProperties, ModeFunction, ModeKind, RateConfig};
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const DESK_ONE_PHONON: &str = "desk-one-phonon";
pub const DESK_TWO_PHONON: &str = "desk-two-phonon";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    /// Base preset for every section that is not given explicitly.
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default)]
    pub fluid: Option<PresetOr<FluidOverrides>>,
    #[serde(default)]
    pub modes: Option<Vec<ModeSpec>>,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub hamiltonian: HamiltonianSection,
    #[serde(default)]
    pub rates: Option<PresetOr<RateOverrides>>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_preset() -> String {
    presets::HE4.to_string()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            preset: default_preset(),
            fluid: None,
            modes: None,
            coupling: CouplingSection::default(),
            hamiltonian: HamiltonianSection::default(),
            rates: None,
            sweep: SweepSection::default(),
            oracle: OracleSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// A preset name or an object of overrides.
#[derive(Debug, Clone)]
pub enum PresetOr<T> {
    Preset(String),
    Values(T),
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for PresetOr<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Ok(PresetOr::Preset(s)),
            other => serde_json::from_value(other)
                .map(PresetOr::Values)
                .map_err(D::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidOverrides {
    pub preset: Option<String>,
    pub alpha_m: Option<f64>,
    pub molar_mass: Option<f64>,
    pub rho0: Option<f64>,
    pub v_s: Option<f64>,
    pub gruneisen: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateOverrides {
    pub preset: Option<String>,
    pub g: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Uniform,
    Box,
    Grid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub kind: ModeKind,
    pub family: Family,
    /// Length along z, m.
    #[serde(rename = "L")]
    pub length: Option<f64>,
    /// Transverse area, m².
    pub area: Option<f64>,
    /// Box mode index.
    pub n: Option<u32>,
    /// Volume of a uniform mode, m³.
    #[serde(rename = "V")]
    pub volume: Option<f64>,
    /// Angular frequency, rad/s. Derived for box modes.
    pub frequency: Option<f64>,
    /// Phase speed, m/s. Defaults to c/√(ε/ε₀) for optical modes and the
    /// sound speed for acoustic modes.
    pub speed: Option<f64>,
    /// Profile samples of a grid mode.
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default = "one")]
    pub polarization: f64,
    #[serde(default)]
    pub include_quadratic: bool,
    /// Requested g′ elements as (i, j, l); all elements when absent.
    pub linear: Option<Vec<[usize; 3]>>,
    /// Requested p elements as (i, j, l₁, l₂); all when absent and
    /// `include_quadratic` is set.
    pub quadratic: Option<Vec<[usize; 4]>>,
}

fn one() -> f64 {
    1.0
}

impl Default for CouplingSection {
    fn default() -> Self {
        Self {
            polarization: 1.0,
            include_quadratic: false,
            linear: None,
            quadratic: None,
        }
    }
}

impl CouplingSection {
    pub fn wants_quadratic(&self) -> bool {
        self.include_quadratic || self.quadratic.is_some()
    }
}

/// Equal coupling g on every (i, j, l), bypassing the mode integrals.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformCoupling {
    pub g: f64,
    pub optical: Vec<f64>,
    pub acoustic: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    pub uniform: Option<UniformCoupling>,
    pub include_quadratic: Option<bool>,
    /// rad/s; defaults to 10⁻³ of the lowest phonon frequency.
    pub resonance_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    #[default]
    Detuning,
    N1,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub parameter: SweepParameter,
    /// Detuning half-width, rad/s; defaults to 5γ.
    pub half_width: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Explicit grid, overriding `half_width` and `points`.
    pub values: Option<Vec<f64>>,
}

fn default_points() -> usize {
    101
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::Detuning,
            half_width: None,
            points: default_points(),
            values: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCheck {
    FirstOrder,
    Scaling,
    SecondOrder,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// Desk-unit configuration of the one-phonon checks.
    pub one_phonon: Option<PresetOr<RateOverrides>>,
    /// Desk-unit configuration of the two-phonon check.
    pub two_phonon: Option<PresetOr<RateOverrides>>,
    /// Offsets of ω₂ from ω₁ + f₁; defaults to 0 and 50g.
    pub first_order_detunings: Option<Vec<f64>>,
    /// Offsets of ω₂ from ω₁ + f₁ + f₂; defaults to five points up to f₁.
    pub second_order_detunings: Option<Vec<f64>>,
    /// Checks to run; all by default.
    pub checks: Option<Vec<OracleCheck>>,
    #[serde(default)]
    pub settings: OracleSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    /// Significant digits of every emitted float.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    9
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            format: None,
            path: None,
            precision: default_precision(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        if !(1..=17).contains(&cfg.output.precision) {
            return Err(CliError::Config(format!(
                "output.precision must lie in 1..=17, got {}",
                cfg.output.precision
            )));
        }
        Ok(cfg)
    }

    /// Expands and validates every section, whichever subcommand runs.
    pub fn validate(&self) -> Result<(), CliError> {
        self.fluid()?;
        self.cavity()?;
        self.modes()?;
        self.rates()?;
        resolve_rates(self.oracle.one_phonon.as_ref(), DESK_ONE_PHONON)?;
        resolve_rates(self.oracle.two_phonon.as_ref(), DESK_TWO_PHONON)?;
        self.oracle.settings.validate()?;
        Ok(())
    }

    pub fn fluid(&self) -> Result<FluidProperties, CliError> {
        let (preset, o) = match &self.fluid {
            None => (self.preset.as_str(), FluidOverrides::default()),
            Some(PresetOr::Preset(name)) => (name.as_str(), FluidOverrides::default()),
            Some(PresetOr::Values(o)) => (o.preset.as_deref().unwrap_or(&self.preset), o.clone()),
        };
        let base = presets::fluid(preset)?;
        let fluid = FluidProperties {
            alpha_m: o.alpha_m.unwrap_or(base.alpha_m),
            molar_mass: o.molar_mass.unwrap_or(base.molar_mass),
            rho0: o.rho0.unwrap_or(base.rho0),
            v_s: o.v_s.unwrap_or(base.v_s),
            gruneisen: o.gruneisen.unwrap_or(base.gruneisen),
        };
        fluid.validate()?;
        Ok(fluid)
    }

    pub fn cavity(&self) -> Result<CavityPreset, CliError> {
        Ok(presets::cavity(&self.preset)?)
    }

    /// Optical and acoustic modes, from the `modes` section or the preset cavity.
    pub fn modes(&self) -> Result<(Vec<ModeFunction>, Vec<ModeFunction>), CliError> {
        let Some(specs) = &self.modes else {
            let cav = self.cavity()?;
            return Ok((cav.optical_modes()?, cav.acoustic_modes()?));
        };
        let fluid = self.fluid()?;
        let mut optical = Vec::new();
        let mut acoustic = Vec::new();
        for (k, spec) in specs.iter().enumerate() {
            let mode = spec.build(&fluid).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("modes[{k}]: {msg}")),
                other => other,
            })?;
            match mode.kind {
                ModeKind::Optical => optical.push(mode),
                ModeKind::Acoustic => acoustic.push(mode),
            }
        }
        if optical.is_empty() || acoustic.is_empty() {
            return Err(CliError::Config(
                "modes must list at least one optical and one acoustic mode".into(),
            ));
        }
        Ok((optical, acoustic))
    }

    /// Rate configuration of the `rates` section.
    pub fn rates(&self) -> Result<RateConfig, CliError> {
        resolve_rates(self.rates.as_ref(), &self.preset)
    }
}

fn rate_preset(name: &str) -> Result<RateConfig, CliError> {
    match name {
        DESK_ONE_PHONON => Ok(presets::desk_one_phonon()),
        DESK_TWO_PHONON => Ok(presets::desk_two_phonon()),
        other => presets::rates(other).map_err(|_| {
            CliError::Config(format!(
                "unknown rate preset `{other}` (known: {}, {DESK_ONE_PHONON}, {DESK_TWO_PHONON})",
                presets::NAMES.join(", ")
            ))
        }),
    }
}

/// Expands the preset, applies overrides, then validates.
pub fn resolve_rates(section: Option<&PresetOr<RateOverrides>>, default: &str) -> Result<RateConfig, CliError> {
    let (preset, o) = match section {
        None => (default, RateOverrides::default()),
        Some(PresetOr::Preset(name)) => (name.as_str(), RateOverrides::default()),
        Some(PresetOr::Values(o)) => (o.preset.as_deref().unwrap_or(default), o.clone()),
    };
    let base = rate_preset(preset)?;
    let cfg = RateConfig {
        g: o.g.unwrap_or(base.g),
        omega1: o.omega1.unwrap_or(base.omega1),
        omega2: o.omega2.unwrap_or(base.omega2),
        f1: o.f1.unwrap_or(base.f1),
        f2: o.f2.unwrap_or(base.f2),
        gamma: o.gamma.unwrap_or(base.gamma),
        kappa: o.kappa.unwrap_or(base.kappa),
        n1: o.n1.unwrap_or(base.n1),
        n2: o.n2.unwrap_or(base.n2),
        mu1: o.mu1.unwrap_or(base.mu1),
        mu2: o.mu2.unwrap_or(base.mu2),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ModeSpec {
    fn require<T: Copy>(value: Option<T>, field: &str, family: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::Config(format!("{family} mode needs `{field}`")))
    }

    fn forbid(&self, fields: &[(&str, bool)], family: &str) -> Result<(), CliError> {
        match fields.iter().find(|(_, present)| *present) {
            Some((name, _)) => Err(CliError::Config(format!("`{name}` does not apply to a {family} mode"))),
            None => Ok(()),
        }
    }

    fn default_speed(&self, fluid: &FluidProperties) -> Result<f64, CliError> {
        match (self.speed, self.kind) {
            (Some(v), _) => Ok(v),
            (None, ModeKind::Acoustic) => Ok(fluid.v_s),
            (None, ModeKind::Optical) => Ok(SPEED_OF_LIGHT / dielectric_constant(fluid, fluid.rho0)?.sqrt()),
        }
    }

    fn build(&self, fluid: &FluidProperties) -> Result<ModeFunction, CliError> {
        let mode = match self.family {
            Family::Uniform => {
                self.forbid(
                    &[
                        ("L", self.length.is_some()),
                        ("area", self.area.is_some()),
                        ("n", self.n.is_some()),
                        ("speed", self.speed.is_some()),
                        ("samples", self.samples.is_some()),
                    ],
                    "uniform",
                )?;
                uniform_mode(
                    self.kind,
                    Self::require(self.volume, "V", "uniform")?,
                    Self::require(self.frequency, "frequency", "uniform")?,
                )?
            }
            Family::Box => {
                self.forbid(
                    &[
                        ("V", self.volume.is_some()),
                        ("frequency", self.frequency.is_some()),
                        ("samples", self.samples.is_some()),
                    ],
                    "box",
                )?;
                box_mode(
                    self.kind,
                    Self::require(self.length, "L", "box")?,
                    Self::require(self.area, "area", "box")?,
                    Self::require(self.n, "n", "box")?,
                    self.default_speed(fluid)?,
                )?
            }
            Family::Grid => {
                self.forbid(&[("V", self.volume.is_some()), ("n", self.n.is_some())], "grid")?;
                let samples = self
                    .samples
                    .clone()
                    .ok_or_else(|| CliError::Config("grid mode needs `samples`".into()))?;
                grid_mode(
                    self.kind,
                    Self::require(self.length, "L", "grid")?,
                    Self::require(self.area, "area", "grid")?,
                    Self::require(self.frequency, "frequency", "grid")?,
                    self.default_speed(fluid)?,
                    samples,
                )?
            }
        };
        Ok(mode)
    }
}
