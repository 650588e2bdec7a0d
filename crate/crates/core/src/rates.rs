//! Golden-rule rates for phonon-assisted photon upconversion.
//!
//! Two optical modes (ω₁ < ω₂) and two phonon modes (f₁, f₂). A photon in
//! mode 1 absorbs one phonon (rate R1, resonant at ω₂ = ω₁ + f₁) or two
//! phonons through a virtual intermediate state (rate R2, resonant at
//! ω₂ = ω₁ + f₁ + f₂). Linewidths γ and κ are half-widths in rad/s.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{require_non_negative, require_positive, Error, Result};

/// Ratio above which a "≪" ordering of the intended regime is reported.
pub const REGIME_WARNING_RATIO: f64 = 0.2;

/// Relative size below which an intermediate-state denominator is singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    /// Linear coupling, rad/s.
    pub g: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub f1: f64,
    pub f2: f64,
    /// Phonon linewidth, rad/s.
    pub gamma: f64,
    /// Cavity linewidth, rad/s.
    pub kappa: f64,
    pub n1: f64,
    pub n2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl RateConfig {
    pub fn validate(&self) -> Result<()> {
        require_non_negative("g", self.g)?;
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("f1", self.f1),
            ("f2", self.f2),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ] {
            require_positive(name, v)?;
        }
        for (name, v) in [("n1", self.n1), ("n2", self.n2), ("mu1", self.mu1), ("mu2", self.mu2)] {
            require_non_negative(name, v)?;
        }
        Ok(())
    }

    /// Orderings of γ ≪ κ ≪ f₁,f₂ ≪ ω₁,ω₂ that do not hold by a wide margin.
    pub fn regime_warnings(&self) -> Vec<String> {
        let f_min = self.f1.min(self.f2);
        let f_max = self.f1.max(self.f2);
        let w_min = self.omega1.min(self.omega2);
        [
            ("gamma", self.gamma, "kappa", self.kappa),
            ("kappa", self.kappa, "min(f1, f2)", f_min),
            ("max(f1, f2)", f_max, "min(omega1, omega2)", w_min),
        ]
        .into_iter()
        .filter(|&(_, small, _, large)| small > REGIME_WARNING_RATIO * large)
        .map(|(a, small, b, large)| format!("{a} = {small:e} is not much smaller than {b} = {large:e}"))
        .collect()
    }

    /// ω₁ − ω₂ + f₁, the one-phonon detuning.
    pub fn one_phonon_detuning(&self) -> f64 {
        self.omega1 - self.omega2 + self.f1
    }

    /// Δ = ω₁ − ω₂ + f₁ + f₂, the two-phonon detuning.
    pub fn two_phonon_detuning(&self) -> f64 {
        (self.omega1 - self.omega2) + self.f1 + self.f2
    }

    /// √(f₁f₂), standing in for a single phonon frequency when f₁ ≠ f₂.
    pub fn effective_phonon_frequency(&self) -> f64 {
        (self.f1 * self.f2).sqrt()
    }

    fn one_phonon_occupation(&self) -> f64 {
        self.mu1 * self.n1 * (self.n2 + 1.0)
    }

    fn two_phonon_occupation(&self) -> f64 {
        let photons = self.n1 + self.n2;
        self.mu1 * self.mu2 * self.n1 * (self.n2 + 1.0) * photons * photons
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pathway {
    /// Upconvert with phonon 1, then absorb phonon 2 dispersively.
    A,
    /// Absorb phonon 1 dispersively, then upconvert with phonon 2.
    B,
    /// Absorb phonon 2 dispersively, then upconvert with phonon 1.
    C,
    /// Upconvert with phonon 2, then absorb phonon 1 dispersively.
    D,
}

impl Pathway {
    pub const ALL: [Pathway; 4] = [Pathway::A, Pathway::B, Pathway::C, Pathway::D];

    pub fn label(self) -> &'static str {
        match self {
            Pathway::A => "A",
            Pathway::B => "B",
            Pathway::C => "C",
            Pathway::D => "D",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Pathway::A => "upconvert with phonon 1, then dispersive absorption of phonon 2",
            Pathway::B => "dispersive absorption of phonon 1, then upconvert with phonon 2",
            Pathway::C => "dispersive absorption of phonon 2, then upconvert with phonon 1",
            Pathway::D => "upconvert with phonon 2, then dispersive absorption of phonon 1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathwayTerm {
    pub pathway: Pathway,
    /// E_intermediate − E_initial, rad/s.
    pub denominator: f64,
    /// 1/denominator, s/rad.
    pub addend: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketBreakdown {
    /// Sum of the four addends, evaluated in a cancellation-free form.
    pub total: f64,
    pub pathways: [PathwayTerm; 4],
}

impl BracketBreakdown {
    pub fn naive_sum(&self) -> f64 {
        self.pathways.iter().map(|p| p.addend).sum()
    }

    pub fn magnitude_scale(&self) -> f64 {
        self.pathways.iter().map(|p| p.addend.abs()).sum()
    }

    pub fn term(&self, pathway: Pathway) -> PathwayTerm {
        self.pathways[pathway as usize]
    }
}

/// Bracket `1/(s−f₁) − 1/f₁ − 1/f₂ + 1/(s−f₂)` for a photon gap s = ω₂ − ω₁.
///
/// The total is computed as `−δ·[1/((s−f₁)f₂) + 1/((s−f₂)f₁)]` with
/// δ = s − f₁ − f₂, which is exactly zero at resonance and keeps full
/// relative precision near it.
pub fn bracket_from_gap(photon_gap: f64, f1: f64, f2: f64) -> Result<BracketBreakdown> {
    require_positive("f1", f1)?;
    require_positive("f2", f2)?;
    let scale = SINGULAR_DENOMINATOR * (f1 * f2).sqrt();
    let d_a = photon_gap - f1;
    let d_d = photon_gap - f2;
    let denominators = [
        (Pathway::A, d_a),
        (Pathway::B, -f1),
        (Pathway::C, -f2),
        (Pathway::D, d_d),
    ];
    for &(pathway, d) in &denominators {
        if !(d.abs() >= scale) {
            return Err(Error::SingularDenominator {
                pathway: pathway.label(),
                denominator: d,
            });
        }
    }
    let delta = d_a - f2;
    let total = -delta * (1.0 / (d_a * f2) + 1.0 / (d_d * f1));
    let pathways = denominators.map(|(pathway, denominator)| PathwayTerm {
        pathway,
        denominator,
        addend: 1.0 / denominator,
    });
    Ok(BracketBreakdown { total, pathways })
}

/// Two-step bracket in s/rad with its four intermediate-state addends.
pub fn two_step_bracket(cfg: &RateConfig) -> Result<BracketBreakdown> {
    cfg.validate()?;
    bracket_from_gap(cfg.omega2 - cfg.omega1, cfg.f1, cfg.f2)
}

/// 2π times the normalized Lorentzian `(w/π)/(w² + x²)`.
fn golden_rule_lineshape(width: f64, detuning: f64) -> f64 {
    2.0 * width / (width * width + detuning * detuning)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Broadening {
    Bare,
    CavityBroadened,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioMode {
    Exact,
    PaperApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    OnePhonon,
    TwoPhononBare,
    TwoPhononBroadened,
    RatioExact,
    RatioPaperApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub kind: RateKind,
    /// rad/s for rates, dimensionless for ratios.
    pub value: f64,
    pub unit: String,
    /// ω₁ − ω₂ + f₁ + f₂, rad/s.
    pub detuning: f64,
    /// ω₁ − ω₂ + f₁, rad/s.
    pub one_phonon_detuning: f64,
    /// √(f₁f₂), rad/s.
    pub effective_phonon_frequency: f64,
    /// 2π × normalized Lorentzian, s/rad.
    pub lineshape: f64,
    pub occupation_factor: f64,
    /// Absent for the broadened rate when a denominator is singular.
    pub bracket: Option<BracketBreakdown>,
    pub warnings: Vec<String>,
}

impl RateResult {
    fn new(cfg: &RateConfig, kind: RateKind, value: f64, lineshape: f64, occupation_factor: f64) -> Self {
        let unit = match kind {
            RateKind::RatioExact | RateKind::RatioPaperApprox => "1",
            _ => "rad/s",
        };
        Self {
            kind,
            value,
            unit: unit.to_string(),
            detuning: cfg.two_phonon_detuning(),
            one_phonon_detuning: cfg.one_phonon_detuning(),
            effective_phonon_frequency: cfg.effective_phonon_frequency(),
            lineshape,
            occupation_factor,
            bracket: two_step_bracket(cfg).ok(),
            warnings: cfg.regime_warnings(),
        }
    }
}

/// `2πg²(γ/π)/[γ² + (ω₁−ω₂+f₁)²] · μ₁n₁(n₂+1)`.
pub fn one_phonon_rate(cfg: &RateConfig) -> Result<RateResult> {
    cfg.validate()?;
    let lineshape = golden_rule_lineshape(cfg.gamma, cfg.one_phonon_detuning());
    let occ = cfg.one_phonon_occupation();
    let value = cfg.g * cfg.g * lineshape * occ;
    Ok(RateResult::new(cfg, RateKind::OnePhonon, value, lineshape, occ))
}

/// Two-phonon rate with either the bare squared bracket or its
/// cavity-broadened replacement κ²/f⁴, f = √(f₁f₂).
pub fn two_phonon_rate(cfg: &RateConfig, broadening: Broadening) -> Result<RateResult> {
    cfg.validate()?;
    let lineshape = golden_rule_lineshape(2.0 * cfg.gamma, cfg.two_phonon_detuning());
    let occ = cfg.two_phonon_occupation();
    let g2 = cfg.g * cfg.g;
    let (kind, squared) = match broadening {
        Broadening::Bare => {
            let b = two_step_bracket(cfg)?.total;
            (RateKind::TwoPhononBare, b * b)
        }
        Broadening::CavityBroadened => (RateKind::TwoPhononBroadened, broadened_bracket_squared(cfg)),
    };
    let value = g2 * g2 * lineshape * occ * squared;
    Ok(RateResult::new(cfg, kind, value, lineshape, occ))
}

fn broadened_bracket_squared(cfg: &RateConfig) -> f64 {
    let f2 = cfg.f1 * cfg.f2;
    cfg.kappa * cfg.kappa / (f2 * f2)
}

/// `g²κ²/(2f⁴)`, the prefactor of the large-n₁ ratio estimate.
pub fn paper_ratio_prefactor(cfg: &RateConfig) -> f64 {
    0.5 * cfg.g * cfg.g * broadened_bracket_squared(cfg)
}

/// R2 (broadened) over R1, each evaluated on its own resonance.
pub fn rate_ratio(cfg: &RateConfig, mode: RatioMode) -> Result<RateResult> {
    cfg.validate()?;
    let one = cfg.g * cfg.g * golden_rule_lineshape(cfg.gamma, 0.0) * cfg.one_phonon_occupation();
    if !(one > 0.0) {
        return Err(Error::Domain(
            "one-phonon rate vanishes (g, n1 or mu1 is zero); ratio undefined".into(),
        ));
    }
    let (kind, value) = match mode {
        RatioMode::Exact => {
            let g2 = cfg.g * cfg.g;
            let two = g2
                * g2
                * golden_rule_lineshape(2.0 * cfg.gamma, 0.0)
                * cfg.two_phonon_occupation()
                * broadened_bracket_squared(cfg);
            (RateKind::RatioExact, two / one)
        }
        RatioMode::PaperApprox => (
            RateKind::RatioPaperApprox,
            paper_ratio_prefactor(cfg) * cfg.n1 * cfg.n1 * cfg.mu2,
        ),
    };
    Ok(RateResult::new(cfg, kind, value, 1.0, 1.0))
}

/// Bose–Einstein occupation `1/(exp(ħf/k_BT) − 1)`; zero at T = 0.
pub fn thermal_occupation(f: f64, temperature: f64) -> Result<f64> {
    require_positive("f", f)?;
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("must be >= 0 K, got {temperature}"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * f / (BOLTZMANN * temperature);
    // e^{-x}/(1 − e^{-x}) never overflows and tends to e^{-x} for large x.
    Ok((-x).exp() / -(-x).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Detuning or photon number, depending on the swept parameter.
    pub parameter: f64,
    pub r1: f64,
    pub r2_bare: f64,
    pub r2_broadened: f64,
    /// R2 (broadened) / R1; NaN when R1 vanishes.
    pub ratio: f64,
}

/// Symmetric grid `half_width·(2i − (n−1))/(n−1)`, exact under i ↔ n−1−i.
pub fn symmetric_grid(half_width: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("points", "a sweep needs at least two points"));
    }
    require_positive("half_width", half_width)?;
    let m = (points - 1) as f64;
    Ok((0..points).map(|i| half_width * (2.0 * i as f64 - m) / m).collect())
}

/// Each rate evaluated at its own detuning equal to the grid value, so
/// both Lorentzians are centred on zero. Rows are returned in grid order.
pub fn detuning_sweep(cfg: &RateConfig, detunings: &[f64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    detunings
        .par_iter()
        .map(|&d| {
            let g2 = cfg.g * cfg.g;
            let r1 = g2 * golden_rule_lineshape(cfg.gamma, d) * cfg.one_phonon_occupation();
            let two = g2 * g2 * golden_rule_lineshape(2.0 * cfg.gamma, d) * cfg.two_phonon_occupation();
            // Photon gap at which the two-phonon detuning equals d.
            let bracket = bracket_from_gap(cfg.f1 + cfg.f2 - d, cfg.f1, cfg.f2)?.total;
            let r2_broadened = two * broadened_bracket_squared(cfg);
            Ok(SweepRow {
                parameter: d,
                r1,
                r2_bare: two * bracket * bracket,
                r2_broadened,
                ratio: if r1 > 0.0 { r2_broadened / r1 } else { f64::NAN },
            })
        })
        .collect()
}

/// Rates from the configuration with n₁ replaced by each value.
pub fn photon_number_sweep(cfg: &RateConfig, n1_values: &[f64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    n1_values
        .par_iter()
        .map(|&n1| {
            let c = RateConfig { n1, ..*cfg };
            let r1 = one_phonon_rate(&c)?.value;
            let r2_broadened = two_phonon_rate(&c, Broadening::CavityBroadened)?.value;
            Ok(SweepRow {
                parameter: n1,
                r1,
                r2_bare: two_phonon_rate(&c, Broadening::Bare)?.value,
                r2_broadened,
                ratio: if r1 > 0.0 { r2_broadened / r1 } else { f64::NAN },
            })
        })
        .collect()
}
