//! Golden-rule predictions against exact closed-system evolution.
//!
//! Both checks run in desk units (ħ = 1, frequencies of order 1–100) and
//! read the optical detuning as the offset of ω₂ above the relevant
//! resonance; the `omega2` field of the configuration is overridden.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, StateVector, DEFAULT_DIMENSION_CAP};
use super::matrix::{build_matrix, SparseMatrix};
use super::propagate::SpectralPropagator;
use crate::coupling::CouplingTensor;
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble, HamiltonianTerm, ModeSpectrum, Monomial, Process};
use crate::rates::{bracket_from_gap, Pathway, RateConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    /// Headroom added to every truncation limit above the largest
    /// occupation reachable from the initial state.
    #[serde(default = "default_extra")]
    pub truncation_extra: usize,
    #[serde(default = "default_cap")]
    pub max_dimension: usize,
    /// Evolution window of the second-order runs, desk time units.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Sample count of the first-order transfer curves.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_extra() -> usize {
    2
}
fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}
fn default_window() -> f64 {
    2000.0
}
fn default_samples() -> usize {
    200
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            truncation_extra: default_extra(),
            max_dimension: default_cap(),
            window: default_window(),
            samples: default_samples(),
        }
    }
}

impl OracleSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::invalid("window", format!("must be > 0, got {}", self.window)));
        }
        if self.samples < 2 {
            return Err(Error::invalid("samples", "need at least two samples"));
        }
        Ok(())
    }
}

fn occupation(name: &'static str, value: f64) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= 64.0 {
        Ok(value as usize)
    } else {
        Err(Error::invalid(
            name,
            format!("Fock occupation must be a whole number in [0, 64], got {value}"),
        ))
    }
}

struct Setup {
    basis: FockBasis,
    terms: Vec<HamiltonianTerm>,
    initial: usize,
    target: usize,
    target_energy: f64,
}

impl Setup {
    fn matrix(&self) -> Result<SparseMatrix> {
        build_matrix(&self.terms, &self.basis)
    }

    fn restricted(&self, keep: &[Monomial]) -> Setup {
        let mut allowed: Vec<Monomial> = keep.to_vec();
        allowed.extend(keep.iter().map(|m| m.adjoint()));
        let terms = self
            .terms
            .iter()
            .filter(|t| t.process == Process::Free || allowed.contains(&t.signature))
            .cloned()
            .collect();
        Setup {
            basis: self.basis.clone(),
            terms,
            ..*self
        }
    }
}

fn build_setup(
    spectrum: ModeSpectrum,
    g: f64,
    photons: &[usize],
    phonons: &[usize],
    target: &[usize],
    extra: usize,
    cap: usize,
) -> Result<Setup> {
    let tensor = CouplingTensor::uniform(g, &spectrum.optical, &spectrum.acoustic)?;
    let terms = assemble(&tensor, &spectrum, false)?;
    // Photon number is conserved by every linear term.
    let n_photons: usize = photons.iter().sum();
    let optical_limits = vec![n_photons + extra; photons.len()];
    let acoustic_limits: Vec<usize> = phonons.iter().map(|&m| m + extra).collect();
    let basis = FockBasis::new(&optical_limits, &acoustic_limits, cap)?;
    let initial_occ: Vec<usize> = photons.iter().chain(phonons).copied().collect();
    let initial = basis.index(&initial_occ).expect("initial state inside truncation");
    let target_idx = basis
        .index(target)
        .ok_or_else(|| Error::invalid("occupations", "target state lies outside the truncation"))?;
    let target_energy = target
        .iter()
        .zip(spectrum.optical.iter().chain(&spectrum.acoustic))
        .map(|(&n, &w)| n as f64 * w)
        .sum();
    Ok(Setup {
        basis,
        terms,
        initial,
        target: target_idx,
        target_energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferSample {
    pub time: f64,
    pub measured: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderRecord {
    /// ω₂ − (ω₁ + f₁).
    pub detuning: f64,
    /// g√(μ₁n₁(n₂+1)).
    pub matrix_element: f64,
    /// 4|M|²/detuning², infinite on resonance.
    pub envelope: f64,
    pub time_window: f64,
    pub samples: Vec<TransferSample>,
    /// max |P − P_pt|/P_pt over the window.
    pub max_relative_deviation: f64,
    /// max |P − P_pt| relative to the envelope (off resonance only).
    pub max_deviation_over_envelope: Option<f64>,
    pub mean_transfer: f64,
    pub max_transfer: f64,
    pub dimension: usize,
    pub truncation_limits: Vec<usize>,
    pub hermiticity_residual: f64,
    pub max_norm_drift: f64,
}

fn first_order_setup(cfg: &RateConfig, detuning: f64, settings: &OracleSettings) -> Result<(Setup, f64)> {
    cfg.validate()?;
    settings.validate()?;
    let n1 = occupation("n1", cfg.n1)?;
    let n2 = occupation("n2", cfg.n2)?;
    let mu1 = occupation("mu1", cfg.mu1)?;
    if n1 == 0 || mu1 == 0 {
        return Err(Error::invalid("n1", "one-phonon transfer needs n1 >= 1 and mu1 >= 1"));
    }
    let omega2 = cfg.omega1 + cfg.f1 + detuning;
    let spectrum = ModeSpectrum::new(vec![cfg.omega1, omega2], vec![cfg.f1]);
    let setup = build_setup(
        spectrum,
        cfg.g,
        &[n1, n2],
        &[mu1],
        &[n1 - 1, n2 + 1, mu1 - 1],
        settings.truncation_extra,
        settings.max_dimension,
    )?;
    let m = cfg.g * (cfg.mu1 * cfg.n1 * (cfg.n2 + 1.0)).sqrt();
    Ok((setup, m))
}

/// First-order transfer |n₁,n₂,μ₁⟩ → |n₁−1,n₂+1,μ₁−1⟩ against
/// `P(t) = 4|M|² sin²(δt/2)/δ²`.
///
/// The window is 0.1/g on resonance; off resonance it is extended to at
/// least ten detuning periods so that time averages are meaningful.
pub fn first_order_check(cfg: &RateConfig, detuning: f64, settings: &OracleSettings) -> Result<FirstOrderRecord> {
    let (setup, m) = first_order_setup(cfg, detuning, settings)?;
    let h = setup.matrix()?;
    let prop = SpectralPropagator::new(&h);
    let mut window = 0.1 / cfg.g;
    if detuning != 0.0 {
        window = window.max(20.0 * std::f64::consts::PI / detuning.abs());
    }
    let times: Vec<f64> = (1..=settings.samples)
        .map(|k| window * k as f64 / settings.samples as f64)
        .collect();
    let amps = prop.transition_amplitudes(setup.initial, setup.target, &times);
    let predicted = |t: f64| {
        if detuning == 0.0 {
            m * m * t * t
        } else {
            let s = (0.5 * detuning * t).sin();
            4.0 * m * m * s * s / (detuning * detuning)
        }
    };
    let samples: Vec<TransferSample> = times
        .iter()
        .zip(&amps)
        .map(|(&t, a)| TransferSample {
            time: t,
            measured: a.norm_sqr(),
            predicted: predicted(t),
        })
        .collect();
    let envelope = if detuning == 0.0 {
        f64::INFINITY
    } else {
        4.0 * m * m / (detuning * detuning)
    };
    let max_relative_deviation = samples
        .iter()
        .filter(|s| s.predicted > 0.0)
        .map(|s| (s.measured - s.predicted).abs() / s.predicted)
        .fold(0.0, f64::max);
    let max_deviation_over_envelope = (detuning != 0.0).then(|| {
        samples
            .iter()
            .map(|s| (s.measured - s.predicted).abs() / envelope)
            .fold(0.0, f64::max)
    });
    let mean_transfer = samples.iter().map(|s| s.measured).sum::<f64>() / samples.len() as f64;
    let max_transfer = samples.iter().map(|s| s.measured).fold(0.0, f64::max);
    let psi0 = StateVector::basis_state(&setup.basis, &setup.basis.occupations(setup.initial))?;
    let coeffs = prop.decompose(&psi0);
    let max_norm_drift = [window * 0.5, window]
        .iter()
        .map(|&t| (prop.state_at(&coeffs, t).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(FirstOrderRecord {
        detuning,
        matrix_element: m,
        envelope,
        time_window: window,
        samples,
        max_relative_deviation,
        max_deviation_over_envelope,
        mean_transfer,
        max_transfer,
        dimension: setup.basis.dimension(),
        truncation_limits: setup.basis.limits().to_vec(),
        hermiticity_residual: h.hermiticity_residual(),
        max_norm_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub predicted_ratio: f64,
    pub measured_ratio: f64,
    pub relative_deviation: f64,
    pub probe_time: f64,
}

/// Transfer probability ratio between two initial occupations at a common
/// early time, against the ratio of μ₁n₁(n₂+1).
pub fn occupation_scaling_check(
    reference: &RateConfig,
    probe: &RateConfig,
    settings: &OracleSettings,
) -> Result<ScalingRecord> {
    let (ref_setup, m_ref) = first_order_setup(reference, 0.0, settings)?;
    let (probe_setup, m_probe) = first_order_setup(probe, 0.0, settings)?;
    let t = 0.1 / m_ref.max(m_probe);
    let transfer = |s: &Setup| -> Result<f64> {
        let prop = SpectralPropagator::new(&s.matrix()?);
        Ok(prop.transition_amplitudes(s.initial, s.target, &[t])[0].norm_sqr())
    };
    let measured_ratio = transfer(&probe_setup)? / transfer(&ref_setup)?;
    let predicted_ratio = (m_probe * m_probe) / (m_ref * m_ref);
    Ok(ScalingRecord {
        predicted_ratio,
        measured_ratio,
        relative_deviation: (measured_ratio / predicted_ratio - 1.0).abs(),
        probe_time: t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// ω₂ − (ω₁ + f₁ + f₂).
    pub detuning: f64,
    pub bracket: f64,
    /// g²|bracket|·√(μ₁μ₂n₁(n₂+1))·(n₁+n₂).
    pub predicted_amplitude: f64,
    /// Same with the exact ladder weights of each intermediate state.
    pub predicted_amplitude_exact_weights: f64,
    pub measured_amplitude: f64,
    /// measured / predicted.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathwayAmplitude {
    pub pathway: Pathway,
    /// E_intermediate − E_initial.
    pub denominator: f64,
    pub predicted_amplitude: f64,
    pub measured_amplitude: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayScan {
    pub detuning: f64,
    pub pathways: Vec<PathwayAmplitude>,
    /// Measured pathway magnitudes rank in the same order as 1/|denominator|.
    pub ordering_matches: bool,
    /// |A_full − Σ_k A_k| / Σ_k |A_k| for the complex slow amplitudes.
    pub coherent_sum_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationRecord {
    /// Largest population of the final state over the window, all pathways on.
    pub full_transfer: f64,
    /// Same with only one pathway's two couplings (and conjugates) kept.
    pub pathway_transfers: Vec<(Pathway, f64)>,
    /// Largest full/single ratio over the four pathways.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderRecord {
    pub scan: Vec<ScanPoint>,
    /// max |measured/predicted − 1| over the scan.
    pub max_relative_deviation: f64,
    pub pathway_scans: Vec<PathwayScan>,
    pub cancellation: CancellationRecord,
    pub window: f64,
    pub dimension: usize,
    pub truncation_limits: Vec<usize>,
    pub max_hermiticity_residual: f64,
    pub max_norm_drift: f64,
}

struct SecondOrderSystem {
    cfg: RateConfig,
    occ: [usize; 4],
}

fn monomial(s: &str) -> Monomial {
    s.parse::<Monomial>().expect("static signature").canonical()
}

/// The two couplings that realise a pathway.
pub fn pathway_monomials(pathway: Pathway) -> [Monomial; 2] {
    let pair = match pathway {
        Pathway::A => ["a2† a1 b1", "a2† a2 b2"],
        Pathway::B => ["a1† a1 b1", "a2† a1 b2"],
        Pathway::C => ["a1† a1 b2", "a2† a1 b1"],
        Pathway::D => ["a2† a1 b2", "a2† a2 b1"],
    };
    pair.map(monomial)
}

impl SecondOrderSystem {
    fn new(cfg: &RateConfig) -> Result<Self> {
        cfg.validate()?;
        let occ = [
            occupation("n1", cfg.n1)?,
            occupation("n2", cfg.n2)?,
            occupation("mu1", cfg.mu1)?,
            occupation("mu2", cfg.mu2)?,
        ];
        if occ[0] == 0 || occ[2] == 0 || occ[3] == 0 {
            return Err(Error::invalid("n1", "two-phonon transfer needs n1, mu1, mu2 >= 1"));
        }
        Ok(Self { cfg: *cfg, occ })
    }

    fn omega2(&self, detuning: f64) -> f64 {
        self.cfg.omega1 + self.cfg.f1 + self.cfg.f2 + detuning
    }

    fn setup(&self, detuning: f64, settings: &OracleSettings) -> Result<Setup> {
        let [n1, n2, mu1, mu2] = self.occ;
        let spectrum = ModeSpectrum::new(
            vec![self.cfg.omega1, self.omega2(detuning)],
            vec![self.cfg.f1, self.cfg.f2],
        );
        build_setup(
            spectrum,
            self.cfg.g,
            &[n1, n2],
            &[mu1, mu2],
            &[n1 - 1, n2 + 1, mu1 - 1, mu2 - 1],
            settings.truncation_extra,
            settings.max_dimension,
        )
    }

    fn gap(&self, detuning: f64) -> f64 {
        self.cfg.f1 + self.cfg.f2 + detuning
    }

    /// Ladder weight √(V_fj V_ji)/g² of each pathway.
    fn pathway_weights(&self) -> [f64; 4] {
        let c = &self.cfg;
        let root = (c.n1 * (c.n2 + 1.0) * c.mu1 * c.mu2).sqrt();
        [root * (c.n2 + 1.0), root * c.n1, root * c.n1, root * (c.n2 + 1.0)]
    }
}

/// Runs one evolution and returns the slow transfer amplitude.
///
/// In the frame of the unperturbed final energy, second-order perturbation
/// theory gives `c_f(t) ≈ (M/δ)(e^{iδt} − 1)` plus fast terms at the
/// intermediate-state frequencies. A Hann-windowed projection onto e^{iδt}
/// isolates M/δ.
struct Run {
    slow: Complex64,
    max_population: f64,
    hermiticity: f64,
    norm_drift: f64,
}

fn run(setup: &Setup, detuning: f64, window: f64) -> Result<Run> {
    let h = setup.matrix()?;
    let hermiticity = h.hermiticity_residual();
    let prop = SpectralPropagator::new(&h);
    let weights = prop.transition_weights(setup.initial, setup.target);
    let max_freq = weights
        .iter()
        .map(|&(e, _)| (setup.target_energy - e).abs())
        .fold(1e-3, f64::max);
    let n = ((window * (4.0 * max_freq + 1.0)).ceil() as usize).max(16);
    let dt = window / n as f64;
    // Phasors e^{i(E_f − E_k)t} advanced by repeated multiplication and
    // re-anchored periodically.
    let rot: Vec<Complex64> = weights
        .iter()
        .map(|&(e, _)| Complex64::from_polar(1.0, (setup.target_energy - e) * dt))
        .collect();
    let demod_rot = Complex64::from_polar(1.0, -detuning * dt);
    let mut phase: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); weights.len()];
    let mut demod = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut wsum = 0.0;
    let mut max_population: f64 = 0.0;
    for k in 0..=n {
        if k % 1024 == 0 {
            let t = k as f64 * dt;
            for (p, &(e, _)) in phase.iter_mut().zip(&weights) {
                *p = Complex64::from_polar(1.0, (setup.target_energy - e) * t);
            }
            demod = Complex64::from_polar(1.0, -detuning * t);
        }
        let c: Complex64 = weights.iter().zip(&phase).map(|(&(_, w), &p)| p * w).sum();
        max_population = max_population.max(c.norm_sqr());
        let hann = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
        acc += c * demod * hann;
        wsum += hann;
        for (p, r) in phase.iter_mut().zip(&rot) {
            *p *= r;
        }
        demod *= demod_rot;
    }
    let psi0 = StateVector::basis_state(&setup.basis, &setup.basis.occupations(setup.initial))?;
    let coeffs = prop.decompose(&psi0);
    let norm_drift = (prop.state_at(&coeffs, window).norm() - 1.0).abs();
    Ok(Run {
        slow: acc / wsum,
        max_population,
        hermiticity,
        norm_drift,
    })
}

/// Two-phonon transfer |n₁,n₂,μ₁,μ₂⟩ → |n₁−1,n₂+1,μ₁−1,μ₂−1⟩ under the full
/// linear term set, at ω₂ = ω₁ + f₁ + f₂ + Δ for each Δ in `detunings`.
///
/// Reports the scan against `g²|bracket(Δ)|`, per-pathway amplitudes at
/// every scan point, and the Δ = 0 interference test against each
/// single-pathway control.
pub fn second_order_check(cfg: &RateConfig, detunings: &[f64], settings: &OracleSettings) -> Result<SecondOrderRecord> {
    settings.validate()?;
    let sys = SecondOrderSystem::new(cfg)?;
    if detunings.iter().any(|&d| d == 0.0 || !d.is_finite()) {
        return Err(Error::invalid("detunings", "scan points must be finite and non-zero"));
    }
    let g2 = cfg.g * cfg.g;
    let photons = cfg.n1 + cfg.n2;
    let occ_root = (cfg.mu1 * cfg.mu2 * cfg.n1 * (cfg.n2 + 1.0)).sqrt();
    let weights = sys.pathway_weights();

    struct PointOutcome {
        point: ScanPoint,
        pathways: PathwayScan,
        hermiticity: f64,
        drift: f64,
        dimension: usize,
        limits: Vec<usize>,
    }

    let outcomes: Vec<PointOutcome> = detunings
        .par_iter()
        .map(|&d| -> Result<PointOutcome> {
            let setup = sys.setup(d, settings)?;
            let full = run(&setup, d, settings.window)?;
            let bracket = bracket_from_gap(sys.gap(d), cfg.f1, cfg.f2)?;
            let predicted = g2 * bracket.total.abs() * occ_root * photons;
            let exact: f64 = bracket
                .pathways
                .iter()
                .zip(&weights)
                .map(|(p, w)| w * p.addend)
                .sum::<f64>()
                .abs()
                * g2;
            let measured = full.slow.norm() * d.abs();
            let mut hermiticity = full.hermiticity;
            let mut drift = full.norm_drift;
            let mut slow_sum = Complex64::new(0.0, 0.0);
            let mut slow_abs = 0.0;
            let mut pathways = Vec::with_capacity(4);
            for (k, &pathway) in Pathway::ALL.iter().enumerate() {
                let single = run(&setup.restricted(&pathway_monomials(pathway)), d, settings.window)?;
                hermiticity = hermiticity.max(single.hermiticity);
                drift = drift.max(single.norm_drift);
                slow_sum += single.slow;
                slow_abs += single.slow.norm();
                let term = bracket.term(pathway);
                let predicted = g2 * weights[k] / term.denominator.abs();
                let measured = single.slow.norm() * d.abs();
                pathways.push(PathwayAmplitude {
                    pathway,
                    denominator: term.denominator,
                    predicted_amplitude: predicted,
                    measured_amplitude: measured,
                    relative_deviation: (measured / predicted - 1.0).abs(),
                });
            }
            let rank = |key: &dyn Fn(&PathwayAmplitude) -> f64| {
                let mut order: Vec<Pathway> = pathways.iter().map(|p| p.pathway).collect();
                order.sort_by(|a, b| {
                    let pa = pathways.iter().find(|p| p.pathway == *a).unwrap();
                    let pb = pathways.iter().find(|p| p.pathway == *b).unwrap();
                    key(pb).total_cmp(&key(pa))
                });
                order
            };
            let ordering_matches = rank(&|p: &PathwayAmplitude| p.predicted_amplitude)
                == rank(&|p: &PathwayAmplitude| p.measured_amplitude);
            Ok(PointOutcome {
                point: ScanPoint {
                    detuning: d,
                    bracket: bracket.total,
                    predicted_amplitude: predicted,
                    predicted_amplitude_exact_weights: exact,
                    measured_amplitude: measured,
                    ratio: measured / predicted,
                },
                pathways: PathwayScan {
                    detuning: d,
                    pathways,
                    ordering_matches,
                    coherent_sum_deviation: (full.slow - slow_sum).norm() / slow_abs,
                },
                hermiticity,
                drift,
                dimension: setup.basis.dimension(),
                limits: setup.basis.limits().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let resonant = sys.setup(0.0, settings)?;
    let full = run(&resonant, 0.0, settings.window)?;
    let singles = Pathway::ALL
        .par_iter()
        .map(|&p| run(&resonant.restricted(&pathway_monomials(p)), 0.0, settings.window).map(|r| (p, r)))
        .collect::<Result<Vec<_>>>()?;
    let worst_ratio = singles
        .iter()
        .map(|(_, r)| full.max_population / r.max_population)
        .fold(0.0, f64::max);

    let mut hermiticity = full.hermiticity;
    let mut drift = full.norm_drift;
    for (_, r) in &singles {
        hermiticity = hermiticity.max(r.hermiticity);
        drift = drift.max(r.norm_drift);
    }
    for o in &outcomes {
        hermiticity = hermiticity.max(o.hermiticity);
        drift = drift.max(o.drift);
    }
    let scan: Vec<ScanPoint> = outcomes.iter().map(|o| o.point).collect();
    Ok(SecondOrderRecord {
        max_relative_deviation: scan.iter().map(|p| (p.ratio - 1.0).abs()).fold(0.0, f64::max),
        scan,
        pathway_scans: outcomes.iter().map(|o| o.pathways.clone()).collect(),
        cancellation: CancellationRecord {
            full_transfer: full.max_population,
            pathway_transfers: singles.iter().map(|(p, r)| (*p, r.max_population)).collect(),
            worst_ratio,
        },
        window: settings.window,
        dimension: outcomes.first().map_or(resonant.basis.dimension(), |o| o.dimension),
        truncation_limits: outcomes
            .first()
            .map_or_else(|| resonant.basis.limits().to_vec(), |o| o.limits.clone()),
        max_hermiticity_residual: hermiticity,
        max_norm_drift: drift,
    })
}

/// Five evenly spaced detunings spanning [0.2, 1]·f₁.
pub fn default_scan(f1: f64) -> Vec<f64> {
    (0..5).map(|k| f1 * (0.2 + 0.2 * k as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn desk() -> RateConfig {
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
            mu2: 1.0,
        }
    }

    #[test]
    fn pathway_monomials_are_distinct_and_cover_four_routes() {
        let mut all: Vec<String> = Pathway::ALL
            .iter()
            .flat_map(|&p| pathway_monomials(p).map(|m| m.to_string()))
            .collect();
        all.sort();
        all.dedup();
        // Each photon hop and each dispersive coupling is shared by two pathways.
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn fractional_occupations_are_rejected() {
        let cfg = RateConfig { n1: 1.5, ..desk() };
        assert!(first_order_check(&cfg, 0.0, &OracleSettings::default()).is_err());
        let cfg = RateConfig { mu2: 0.0, ..desk() };
        assert!(second_order_check(&cfg, &[0.6], &OracleSettings::default()).is_err());
    }

    #[test]
    fn first_order_resonant_transfer_follows_quadratic_law() {
        let rec = first_order_check(&desk(), 0.0, &OracleSettings::default()).unwrap();
        assert!(rec.max_relative_deviation < 0.01, "{}", rec.max_relative_deviation);
        assert_eq!(rec.truncation_limits, vec![3, 3, 3]);
    }

    #[test]
    fn truncation_headroom_does_not_change_transfer() {
        let base = OracleSettings::default();
        let wider = OracleSettings {
            truncation_extra: 3,
            ..base
        };
        let a = first_order_check(&desk(), 0.0, &base).unwrap();
        let b = first_order_check(&desk(), 0.0, &wider).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x.measured - y.measured).abs() <= 1e-3 * y.measured);
        }
    }

    #[test]
    fn dimension_cap_is_respected() {
        let settings = OracleSettings {
            max_dimension: 10,
            ..Default::default()
        };
        assert!(matches!(
            first_order_check(&desk(), 0.0, &settings),
            Err(Error::DimensionOverflow { .. })
        ));
    }
}
