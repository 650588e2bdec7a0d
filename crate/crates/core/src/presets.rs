//! Named parameter sets for liquid ⁴He in a small optical cavity.

use std::f64::consts::PI;

use crate::constants::optical_angular_frequency;
use crate::error::{Error, Result};
use crate::material::FluidProperties;
use crate::modes::{uniform_mode, ModeFunction, ModeKind};
use crate::rates::RateConfig;

pub const HE4: &str = "paper-he4";
pub const FIBER_CAVITY: &str = "paper-fiber-cavity";
pub const RATES: &str = "paper-rates";

pub const NAMES: [&str; 3] = [HE4, FIBER_CAVITY, RATES];

pub fn fluid(name: &str) -> Result<FluidProperties> {
    match name {
        HE4 | FIBER_CAVITY | RATES => Ok(FluidProperties::helium4()),
        other => Err(unknown(other)),
    }
}

fn unknown(name: &str) -> Error {
    Error::Domain(format!("unknown preset `{name}` (known: {})", NAMES.join(", ")))
}

/// Helium-filled cavity of mode volume V with uniform optical and acoustic
/// profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityPreset {
    /// m³.
    pub volume: f64,
    /// Vacuum wavelength of the lower optical mode, m.
    pub wavelength: f64,
    /// Phonon angular frequency, rad/s.
    pub phonon_frequency: f64,
}

impl CavityPreset {
    pub fn fiber() -> Self {
        Self {
            volume: 1e-14,
            wavelength: 1e-6,
            phonon_frequency: 2.0 * PI * 1e7,
        }
    }

    pub fn optical_frequency(&self) -> f64 {
        optical_angular_frequency(self.wavelength)
    }

    /// Two optical modes one phonon quantum apart.
    pub fn optical_modes(&self) -> Result<Vec<ModeFunction>> {
        let w = self.optical_frequency();
        Ok(vec![
            uniform_mode(ModeKind::Optical, self.volume, w)?,
            uniform_mode(ModeKind::Optical, self.volume, w + self.phonon_frequency)?,
        ])
    }

    pub fn acoustic_modes(&self) -> Result<Vec<ModeFunction>> {
        Ok(vec![uniform_mode(
            ModeKind::Acoustic,
            self.volume,
            self.phonon_frequency,
        )?])
    }
}

pub fn cavity(name: &str) -> Result<CavityPreset> {
    match name {
        HE4 | FIBER_CAVITY | RATES => Ok(CavityPreset::fiber()),
        other => Err(unknown(other)),
    }
}

/// Two-phonon configuration at optical frequencies: g = 2π×20 rad/s,
/// f₁ = f₂ = 2π×10 MHz, κ = f/10, γ = 2π×10 rad/s, n₁ = 10⁶, μ₁ = μ₂ = 10,
/// ω₂ on the two-phonon resonance of ω₁ = 2πc/1 µm.
pub fn paper_rates() -> RateConfig {
    let f = 2.0 * PI * 1e7;
    // Whole-number ω₁ keeps the resonance condition close to exact in floating point.
    let omega1 = optical_angular_frequency(1e-6).round();
    RateConfig {
        g: 2.0 * PI * 20.0,
        omega1,
        omega2: omega1 + 2.0 * f,
        f1: f,
        f2: f,
        gamma: 2.0 * PI * 10.0,
        kappa: 0.1 * f,
        n1: 1e6,
        n2: 0.0,
        mu1: 10.0,
        mu2: 10.0,
    }
}

pub fn rates(name: &str) -> Result<RateConfig> {
    match name {
        HE4 | FIBER_CAVITY | RATES => Ok(paper_rates()),
        other => Err(unknown(other)),
    }
}

/// Desk-unit configuration for the one-phonon oracle: ω₁ = 100, f₁ = 3,
/// g = 0.01, one photon and one phonon.
pub fn desk_one_phonon() -> RateConfig {
    RateConfig {
        g: 0.01,
        omega1: 100.0,
        omega2: 103.0,
        f1: 3.0,
        f2: 5.0,
        gamma: 1e-3,
        kappa: 0.1,
        n1: 1.0,
        n2: 0.0,
        mu1: 1.0,
        mu2: 0.0,
    }
}

/// Desk-unit configuration for the two-phonon oracle: f₁ = 3, f₂ = 5.
pub fn desk_two_phonon() -> RateConfig {
    RateConfig {
        omega2: 108.0,
        mu2: 1.0,
        ..desk_one_phonon()
    }
}
