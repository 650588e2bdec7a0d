//! Symbolic rotating-frame Hamiltonian.
//!
//! Terms are normally ordered operator monomials over photon modes `a_i` and
//! phonon modes `b_l`, each carrying a coefficient (rad/s, ħ = 1) and the
//! frequency at which it oscillates in the frame rotating with the free
//! Hamiltonian. Terms oscillating at twice an optical frequency are never
//! generated.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coupling::CouplingTensor;
use crate::error::{Error, Result};
use crate::modes::ModeFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeRef {
    Optical(usize),
    Acoustic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub mode: ModeRef,
    pub create: bool,
}

impl Ladder {
    pub fn create(mode: ModeRef) -> Self {
        Self { mode, create: true }
    }

    pub fn annihilate(mode: ModeRef) -> Self {
        Self { mode, create: false }
    }

    fn adjoint(self) -> Self {
        Self {
            create: !self.create,
            ..self
        }
    }
}

/// Operator product, leftmost factor applied last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Monomial(pub Vec<Ladder>);

impl Monomial {
    pub fn factors(&self) -> &[Ladder] {
        &self.0
    }

    /// Hermitian adjoint. For a normally ordered monomial the reversed
    /// product is again normally ordered.
    pub fn adjoint(&self) -> Monomial {
        Monomial(self.0.iter().rev().map(|l| l.adjoint()).collect()).canonical()
    }

    /// Photon factors before phonon factors; within each, creators before
    /// annihilators, then by index. Only valid for normally ordered input,
    /// where the reordering is a product of commuting swaps.
    pub fn canonical(mut self) -> Monomial {
        self.0
            .sort_by_key(|l| (matches!(l.mode, ModeRef::Acoustic(_)), !l.create, l.mode));
        self
    }

    /// Net frequency: +ω for each creator, −ω for each annihilator.
    pub fn oscillation(&self, spectrum: &ModeSpectrum) -> f64 {
        self.0
            .iter()
            .map(|l| {
                let w = spectrum.frequency(l.mode);
                if l.create {
                    w
                } else {
                    -w
                }
            })
            .sum()
    }

    /// Net number of phonons absorbed.
    fn phonons_absorbed(&self) -> i64 {
        self.0
            .iter()
            .filter(|l| matches!(l.mode, ModeRef::Acoustic(_)))
            .map(|l| if l.create { -1 } else { 1 })
            .sum()
    }

    fn photon_pair(&self) -> Option<(usize, usize)> {
        let mut created = self.0.iter().filter_map(|l| match (l.mode, l.create) {
            (ModeRef::Optical(i), true) => Some(i),
            _ => None,
        });
        let mut destroyed = self.0.iter().filter_map(|l| match (l.mode, l.create) {
            (ModeRef::Optical(j), false) => Some(j),
            _ => None,
        });
        match (created.next(), destroyed.next(), created.next(), destroyed.next()) {
            (Some(i), Some(j), None, None) => Some((i, j)),
            _ => None,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let (letter, idx) = match l.mode {
                ModeRef::Optical(i) => ('a', i),
                ModeRef::Acoustic(i) => ('b', i),
            };
            write!(f, "{letter}{}", idx + 1)?;
            if l.create {
                f.write_str("†")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses the display form, e.g. `a2† a1 b1`, with 1-based labels.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |tok: &str| Error::invalid("signature", format!("cannot parse operator `{tok}`"));
        let factors = s
            .split_whitespace()
            .map(|tok| {
                let (body, create) = match tok.strip_suffix('†') {
                    Some(b) => (b, true),
                    None => (tok, false),
                };
                let mut chars = body.chars();
                let letter = chars.next().ok_or_else(|| bad(tok))?;
                let idx: usize = chars.as_str().parse().map_err(|_| bad(tok))?;
                if idx == 0 {
                    return Err(bad(tok));
                }
                let mode = match letter {
                    'a' => ModeRef::Optical(idx - 1),
                    'b' => ModeRef::Acoustic(idx - 1),
                    _ => return Err(bad(tok)),
                };
                Ok(Ladder { mode, create })
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::invalid("signature", "empty operator monomial"));
        }
        Ok(Monomial(factors))
    }
}

impl From<Monomial> for String {
    fn from(m: Monomial) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Monomial {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Angular frequencies of the photon and phonon modes, rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub optical: Vec<f64>,
    pub acoustic: Vec<f64>,
}

impl ModeSpectrum {
    pub fn new(optical: Vec<f64>, acoustic: Vec<f64>) -> Self {
        Self { optical, acoustic }
    }

    pub fn from_modes(optical: &[ModeFunction], acoustic: &[ModeFunction]) -> Self {
        Self {
            optical: optical.iter().map(|m| m.frequency).collect(),
            acoustic: acoustic.iter().map(|m| m.frequency).collect(),
        }
    }

    pub fn from_tensor(tensor: &CouplingTensor) -> Self {
        Self {
            optical: tensor.metadata.optical_frequencies.clone(),
            acoustic: tensor.metadata.acoustic_frequencies.clone(),
        }
    }

    pub fn frequency(&self, mode: ModeRef) -> f64 {
        match mode {
            ModeRef::Optical(i) => self.optical[i],
            ModeRef::Acoustic(l) => self.acoustic[l],
        }
    }

    /// 10⁻³ of the smallest phonon frequency.
    pub fn default_resonance_tolerance(&self) -> f64 {
        1e-3 * self.acoustic.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    /// A photon moves up in frequency by absorbing phonons.
    Upconversion,
    /// A photon moves down in frequency while emitting phonons.
    Downconversion,
    /// Photon number of a single mode couples to the phonon field.
    Dispersive,
    /// Photon and phonon energies change in the same direction.
    CounterRotating,
    Free,
}

impl Process {
    pub fn of(signature: &Monomial, spectrum: &ModeSpectrum) -> Process {
        let f = signature.factors();
        if f.len() == 2 && f[0].mode == f[1].mode && f[0].create != f[1].create {
            return Process::Free;
        }
        let Some((i, j)) = signature.photon_pair() else {
            return Process::CounterRotating;
        };
        if i == j {
            return Process::Dispersive;
        }
        let absorbed = signature.phonons_absorbed();
        let (wi, wj) = (spectrum.optical[i], spectrum.optical[j]);
        if absorbed > 0 && wi >= wj {
            Process::Upconversion
        } else if absorbed < 0 && wi <= wj {
            Process::Downconversion
        } else {
            Process::CounterRotating
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub signature: Monomial,
    /// Prefactor including sign, rad/s.
    pub coefficient: f64,
    /// Net rotating-frame frequency, rad/s.
    pub oscillation: f64,
    pub process: Process,
}

impl HamiltonianTerm {
    pub fn new(signature: Monomial, coefficient: f64, spectrum: &ModeSpectrum) -> Self {
        let signature = signature.canonical();
        Self {
            oscillation: signature.oscillation(spectrum),
            process: Process::of(&signature, spectrum),
            signature,
            coefficient,
        }
    }
}

fn a(i: usize) -> ModeRef {
    ModeRef::Optical(i)
}

fn b(l: usize) -> ModeRef {
    ModeRef::Acoustic(l)
}

/// `ω_i a_i†a_i` and `f_l b_l†b_l`.
pub fn free_terms(spectrum: &ModeSpectrum) -> Vec<HamiltonianTerm> {
    let photons = spectrum.optical.iter().enumerate().map(|(i, &w)| (a(i), w));
    let phonons = spectrum.acoustic.iter().enumerate().map(|(l, &f)| (b(l), f));
    photons
        .chain(phonons)
        .map(|(m, w)| HamiltonianTerm::new(Monomial(vec![Ladder::create(m), Ladder::annihilate(m)]), w, spectrum))
        .collect()
}

fn check_tensor_shape(tensor: &CouplingTensor, spectrum: &ModeSpectrum) -> Result<()> {
    let (n_opt, n_ac) = (spectrum.optical.len(), spectrum.acoustic.len());
    for i in 0..n_opt {
        for j in 0..n_opt {
            for l in 0..n_ac {
                tensor.linear_element(i, j, l)?;
            }
        }
    }
    Ok(())
}

/// Every monomial of `−Σ_ijl g_ijl a_i†a_j (b_l + b_l†) + h.c.`, listed once
/// per (i, j, l) together with its conjugates: `4·N_opt²·N_ac` entries, each
/// distinct monomial appearing twice.
pub fn enumerate_linear_monomials(tensor: &CouplingTensor, spectrum: &ModeSpectrum) -> Result<Vec<HamiltonianTerm>> {
    check_tensor_shape(tensor, spectrum)?;
    let (n_opt, n_ac) = (spectrum.optical.len(), spectrum.acoustic.len());
    let mut raw = Vec::with_capacity(4 * n_opt * n_opt * n_ac);
    for i in 0..n_opt {
        for j in 0..n_opt {
            for l in 0..n_ac {
                let g = tensor.linear_element(i, j, l)?;
                for phonon in [Ladder::annihilate(b(l)), Ladder::create(b(l))] {
                    let m = Monomial(vec![Ladder::create(a(i)), Ladder::annihilate(a(j)), phonon]);
                    let conj = m.adjoint();
                    raw.push(HamiltonianTerm::new(m, -g, spectrum));
                    raw.push(HamiltonianTerm::new(conj, -g, spectrum));
                }
            }
        }
    }
    Ok(raw)
}

/// Merges entries with identical signatures. Each distinct monomial keeps
/// the mean of its listed coefficients, so a conjugate pair always ends up
/// with equal (real) coefficients.
pub fn pair_conjugates(raw: Vec<HamiltonianTerm>) -> Vec<HamiltonianTerm> {
    let mut order: Vec<HamiltonianTerm> = Vec::new();
    let mut seen: BTreeMap<Monomial, (usize, usize)> = BTreeMap::new();
    for term in raw {
        match seen.get_mut(&term.signature) {
            Some((idx, count)) => {
                order[*idx].coefficient += term.coefficient;
                *count += 1;
            }
            None => {
                seen.insert(term.signature.clone(), (order.len(), 1));
                order.push(term);
            }
        }
    }
    for (idx, count) in seen.values() {
        order[*idx].coefficient /= *count as f64;
    }
    order
}

/// Linear interaction terms, one per distinct monomial: `2·N_opt²·N_ac` terms.
pub fn assemble_linear(tensor: &CouplingTensor, spectrum: &ModeSpectrum) -> Result<Vec<HamiltonianTerm>> {
    Ok(pair_conjugates(enumerate_linear_monomials(tensor, spectrum)?))
}

/// Two-phonon absorption terms `−p a_i†a_j b_l₁ b_l₂` and their conjugates.
/// For l₁ ≠ l₂ both orderings of the phonon sum contribute.
pub fn assemble_quadratic(tensor: &CouplingTensor, spectrum: &ModeSpectrum) -> Result<Vec<HamiltonianTerm>> {
    let (n_opt, n_ac) = (spectrum.optical.len(), spectrum.acoustic.len());
    let mut terms = Vec::new();
    for i in 0..n_opt {
        for j in 0..n_opt {
            for l1 in 0..n_ac {
                for l2 in l1..n_ac {
                    let p = tensor.quadratic_element(i, j, l1, l2)?;
                    let weight = if l1 == l2 { 1.0 } else { 2.0 };
                    let m = Monomial(vec![
                        Ladder::create(a(i)),
                        Ladder::annihilate(a(j)),
                        Ladder::annihilate(b(l1)),
                        Ladder::annihilate(b(l2)),
                    ]);
                    let conj = m.adjoint();
                    terms.push(HamiltonianTerm::new(m, -weight * p, spectrum));
                    terms.push(HamiltonianTerm::new(conj, -weight * p, spectrum));
                }
            }
        }
    }
    Ok(terms)
}

/// Free part plus linear interaction, optionally with the two-phonon terms.
pub fn assemble(
    tensor: &CouplingTensor,
    spectrum: &ModeSpectrum,
    include_quadratic: bool,
) -> Result<Vec<HamiltonianTerm>> {
    let mut terms = free_terms(spectrum);
    terms.extend(assemble_linear(tensor, spectrum)?);
    if include_quadratic {
        terms.extend(assemble_quadratic(tensor, spectrum)?);
    }
    Ok(terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedTerm {
    #[serde(flatten)]
    pub term: HamiltonianTerm,
    pub resonant: bool,
}

/// Flags each term resonant iff `|oscillation| ≤ tolerance`.
pub fn classify_terms(terms: &[HamiltonianTerm], tolerance: f64) -> Result<Vec<ClassifiedTerm>> {
    if !(tolerance >= 0.0) {
        return Err(Error::invalid("tolerance", format!("must be >= 0, got {tolerance}")));
    }
    Ok(terms
        .iter()
        .map(|t| ClassifiedTerm {
            term: t.clone(),
            resonant: t.oscillation.abs() <= tolerance,
        })
        .collect())
}

/// Returns the signatures of terms whose conjugate is absent or carries a
/// different coefficient or oscillation.
pub fn hermitian_closure_violations(terms: &[HamiltonianTerm]) -> Vec<Monomial> {
    let by_signature: BTreeMap<&Monomial, &HamiltonianTerm> = terms.iter().map(|t| (&t.signature, t)).collect();
    terms
        .iter()
        .filter(|t| {
            let conj = t.signature.adjoint();
            match by_signature.get(&conj) {
                Some(c) => {
                    let scale = t.coefficient.abs().max(t.oscillation.abs()).max(1e-300);
                    (c.coefficient - t.coefficient).abs() > 1e-12 * scale
                        || (c.oscillation + t.oscillation).abs() > 1e-12 * t.oscillation.abs().max(1.0)
                }
                None => true,
            }
        })
        .map(|t| t.signature.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spectrum2() -> ModeSpectrum {
        ModeSpectrum::new(vec![103.0, 100.0], vec![3.0])
    }

    fn sig(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn two_photon_one_phonon_gives_eight_monomials_with_common_coefficient() {
        let spectrum = spectrum2();
        let tensor = CouplingTensor::uniform(0.25, &spectrum.optical, &spectrum.acoustic).unwrap();
        let terms = assemble_linear(&tensor, &spectrum).unwrap();
        let mut got: Vec<String> = terms.iter().map(|t| t.signature.to_string()).collect();
        got.sort();
        let mut want = vec![
            "a1† a1 b1",
            "a1† a1 b1†",
            "a2† a2 b1",
            "a2† a2 b1†",
            "a1† a2 b1",
            "a1† a2 b1†",
            "a2† a1 b1",
            "a2† a1 b1†",
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(terms.iter().all(|t| t.coefficient == -0.25));
        assert_eq!(enumerate_linear_monomials(&tensor, &spectrum).unwrap().len(), 16);
    }

    #[test]
    fn single_photon_mode_gives_dispersive_pair() {
        let spectrum = ModeSpectrum::new(vec![100.0], vec![3.0]);
        let tensor = CouplingTensor::uniform(0.1, &spectrum.optical, &spectrum.acoustic).unwrap();
        let terms = assemble_linear(&tensor, &spectrum).unwrap();
        assert_eq!(terms.len(), 2);
        let mut osc: Vec<f64> = terms.iter().map(|t| t.oscillation).collect();
        osc.sort_by(f64::total_cmp);
        assert_eq!(osc, vec![-3.0, 3.0]);
        assert!(terms.iter().all(|t| t.process == Process::Dispersive));
    }

    #[test]
    fn resonant_upconversion_is_recognized() {
        // ω₁ = ω₂ + f
        let spectrum = spectrum2();
        let t = HamiltonianTerm::new(sig("a1† a2 b1"), -1.0, &spectrum);
        assert_eq!(t.process, Process::Upconversion);
        let c = classify_terms(&[t], 1e-3).unwrap();
        assert!(c[0].resonant);
        let down = HamiltonianTerm::new(sig("a2† a1 b1†"), -1.0, &spectrum);
        assert_eq!(down.process, Process::Downconversion);
        let counter = HamiltonianTerm::new(sig("a2† a1 b1"), -1.0, &spectrum);
        assert_eq!(counter.process, Process::CounterRotating);
    }

    #[test]
    fn dispersive_term_is_off_resonant() {
        let spectrum = spectrum2();
        let t = HamiltonianTerm::new(sig("a1† a1 b1"), -1.0, &spectrum);
        assert_eq!(t.oscillation, -3.0);
        let c = classify_terms(&[t], 2.9).unwrap();
        assert!(!c[0].resonant);
        assert_eq!(c[0].term.process, Process::Dispersive);
    }

    #[test]
    fn two_step_configuration_has_no_resonant_linear_term() {
        let (f1, f2) = (3.0, 5.0);
        let spectrum = ModeSpectrum::new(vec![100.0, 100.0 + f1 + f2], vec![f1, f2]);
        let tensor = CouplingTensor::uniform(0.01, &spectrum.optical, &spectrum.acoustic).unwrap();
        let terms = assemble_linear(&tensor, &spectrum).unwrap();
        let tol = spectrum.default_resonance_tolerance();
        for c in classify_terms(&terms, tol).unwrap() {
            assert!(!c.resonant);
            assert!(c.term.oscillation.abs() >= f1.min(f2) - 1e-12);
        }
    }

    #[test]
    fn free_terms_do_not_oscillate() {
        let spectrum = spectrum2();
        let free = free_terms(&spectrum);
        assert_eq!(free.len(), 3);
        assert!(free.iter().all(|t| t.oscillation == 0.0 && t.process == Process::Free));
        assert_eq!(free[0].coefficient, 103.0);
    }

    #[test]
    fn quadratic_terms_close_under_conjugation() {
        let spectrum = ModeSpectrum::new(vec![100.0, 108.0], vec![3.0, 5.0]);
        let mut tensor = CouplingTensor::uniform(0.01, &spectrum.optical, &spectrum.acoustic).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for l1 in 0..2 {
                    for l2 in l1..2 {
                        tensor.quadratic.insert((i, j, l1, l2), 1e-6);
                    }
                }
            }
        }
        let terms = assemble(&tensor, &spectrum, true).unwrap();
        assert!(hermitian_closure_violations(&terms).is_empty());
        let up = terms
            .iter()
            .find(|t| t.signature == sig("a2† a1 b1 b2"))
            .expect("two-phonon absorption term");
        assert_eq!(up.oscillation, 0.0);
        assert_eq!(up.process, Process::Upconversion);
        assert_eq!(up.coefficient, -2e-6);
    }

    #[test]
    fn missing_elements_are_reported() {
        let spectrum = spectrum2();
        let tensor = CouplingTensor::uniform(0.1, &[1.0], &[1.0]).unwrap();
        assert!(matches!(
            assemble_linear(&tensor, &spectrum),
            Err(Error::MissingCoupling(_))
        ));
        assert!(matches!(
            assemble_quadratic(&tensor, &spectrum),
            Err(Error::MissingCoupling(_))
        ));
    }

    #[test]
    fn signature_round_trips_through_json() {
        let spectrum = spectrum2();
        let t = HamiltonianTerm::new(sig("a1† a2 b1"), -1.5, &spectrum);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"a1† a2 b1\""));
        assert!(json.contains("\"upconversion\""));
        let back: HamiltonianTerm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!("c1 a2".parse::<Monomial>().is_err());
        assert!("a0".parse::<Monomial>().is_err());
    }

    proptest! {
        #[test]
        fn assembly_is_hermitian_closed(
            n_opt in 1usize..=3,
            n_ac in 1usize..=3,
            seed in proptest::collection::vec(0.1f64..10.0, 6),
            gs in proptest::collection::vec(-1.0f64..1.0, 27),
        ) {
            let spectrum = ModeSpectrum::new(
                (0..n_opt).map(|i| 100.0 + seed[i]).collect(),
                (0..n_ac).map(|l| seed[3 + l]).collect(),
            );
            let mut tensor = CouplingTensor::uniform(0.0, &spectrum.optical, &spectrum.acoustic).unwrap();
            for i in 0..n_opt {
                for j in 0..n_opt {
                    for l in 0..n_ac {
                        // Symmetric in (i, j), as for real profiles.
                        let (p, q) = if i <= j { (i, j) } else { (j, i) };
                        tensor.linear.insert((i, j, l), gs[9 * p + 3 * q + l]);
                    }
                }
            }
            let terms = assemble(&tensor, &spectrum, false).unwrap();
            prop_assert!(hermitian_closure_violations(&terms).is_empty());
            prop_assert_eq!(enumerate_linear_monomials(&tensor, &spectrum).unwrap().len(), 4 * n_opt * n_opt * n_ac);
            prop_assert_eq!(terms.len(), n_opt + n_ac + 2 * n_opt * n_opt * n_ac);
        }
    }
}
