//! Linear and quadratic optomechanical coupling elements.
//!
//! Photon field amplitudes scale as `√(ħω/2ε₀)` per photon and density
//! deviations as `√(ħf/2ρ₀v_s²)` per phonon. Combining them with the
//! electrostrictive energy `−½g₁ε₀ρ̃E²` gives
//!
//! ```text
//! g′_ijl     = √(ħ f_l ω_i ω_j / 8ρ₀v_s²) · g₁ · ∫ ψ_l u_i u_j d³r
//! p_ijl₁l₂   = √(ħ f_l₁ ω_i ω_j / 8ρ₀v_s²) · g₂ · √(ħ f_l₂ / 2ρ₀v_s²) · ∫ ψ_l₁ ψ_l₂ u_i u_j d³r
//! ```
//!
//! Profiles are real, so the g′/g″ distinction collapses to a single element.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{EPSILON_0, HBAR};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::material::MaterialCoefficients;
use crate::modes::{self, ModeFunction, ModeKind};

/// Electric-field amplitude carried by one photon, `√(ħω/2ε₀)`.
pub fn photon_scale(omega: f64) -> f64 {
    (HBAR * omega.max(0.0) / (2.0 * EPSILON_0)).sqrt()
}

/// Density-deviation amplitude carried by one phonon, `√(ħf/2ρ₀v_s²)`, m^(3/2).
pub fn phonon_scale(mat: &MaterialCoefficients, f: f64) -> f64 {
    (HBAR * f.max(0.0) / (2.0 * mat.bulk_modulus_coeff)).sqrt()
}

/// Options shared by all coupling computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingOptions {
    /// Alignment factor of the two optical polarizations, in [0, 1].
    #[serde(default = "default_polarization")]
    pub polarization: f64,
    /// Also compute the two-phonon elements p_ijl₁l₂.
    #[serde(default)]
    pub include_quadratic: bool,
}

fn default_polarization() -> f64 {
    1.0
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            polarization: 1.0,
            include_quadratic: false,
        }
    }
}

impl CouplingOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.polarization) {
            return Err(Error::invalid(
                "polarization",
                format!("alignment factor must lie in [0, 1], got {}", self.polarization),
            ));
        }
        Ok(())
    }
}

fn check_kinds(optical: &[&ModeFunction], acoustic: &[&ModeFunction]) -> Result<()> {
    for m in optical {
        if m.kind != ModeKind::Optical {
            return Err(Error::invalid("u", "expected an optical mode"));
        }
        require_positive("omega", m.frequency)?;
    }
    for m in acoustic {
        if m.kind != ModeKind::Acoustic {
            return Err(Error::invalid("psi", "expected an acoustic mode"));
        }
        require_positive("f", m.frequency)?;
    }
    Ok(())
}

/// g′_ijl in rad/s with an explicit polarization alignment factor.
pub fn linear_coupling_element_with(
    mat: &MaterialCoefficients,
    u_i: &ModeFunction,
    u_j: &ModeFunction,
    psi_l: &ModeFunction,
    polarization: f64,
) -> Result<f64> {
    check_kinds(&[u_i, u_j], &[psi_l])?;
    let integral = modes::overlap(&[psi_l, u_i, u_j])?;
    let prefactor = (HBAR * psi_l.frequency * u_i.frequency * u_j.frequency / (8.0 * mat.bulk_modulus_coeff)).sqrt();
    Ok(prefactor * mat.g1 * polarization * integral)
}

/// g′_ijl in rad/s for co-polarized modes.
pub fn linear_coupling_element(
    mat: &MaterialCoefficients,
    u_i: &ModeFunction,
    u_j: &ModeFunction,
    psi_l: &ModeFunction,
) -> Result<f64> {
    linear_coupling_element_with(mat, u_i, u_j, psi_l, 1.0)
}

/// Closed-form g′ for uniform modes of volume V: `√(ħf/8ρ₀v_s²)·ω·g₁/√V`.
pub fn linear_coupling_uniform_estimate(mat: &MaterialCoefficients, omega: f64, f: f64, volume: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("f", f)?;
    require_positive("volume", volume)?;
    Ok((HBAR * f / (8.0 * mat.bulk_modulus_coeff)).sqrt() * omega * mat.g1 / volume.sqrt())
}

/// p_ijl₁l₂ in rad/s with an explicit polarization alignment factor.
///
/// The prefactor `√f_l₁·√f_l₂` is already symmetric under l₁ ↔ l₂.
pub fn quadratic_coupling_element_with(
    mat: &MaterialCoefficients,
    u_i: &ModeFunction,
    u_j: &ModeFunction,
    psi_l1: &ModeFunction,
    psi_l2: &ModeFunction,
    polarization: f64,
) -> Result<f64> {
    check_kinds(&[u_i, u_j], &[psi_l1, psi_l2])?;
    let integral = modes::overlap(&[psi_l1, psi_l2, u_i, u_j])?;
    let b = mat.bulk_modulus_coeff;
    let first = (HBAR * psi_l1.frequency * u_i.frequency * u_j.frequency / (8.0 * b)).sqrt();
    let second = (HBAR * psi_l2.frequency / (2.0 * b)).sqrt();
    Ok(first * mat.g2 * second * polarization * integral)
}

pub fn quadratic_coupling_element(
    mat: &MaterialCoefficients,
    u_i: &ModeFunction,
    u_j: &ModeFunction,
    psi_l1: &ModeFunction,
    psi_l2: &ModeFunction,
) -> Result<f64> {
    quadratic_coupling_element_with(mat, u_i, u_j, psi_l1, psi_l2, 1.0)
}

/// Closed-form p for uniform modes with identical optical profiles.
pub fn quadratic_coupling_uniform_estimate(
    mat: &MaterialCoefficients,
    omega: f64,
    f1: f64,
    f2: f64,
    volume: f64,
) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("f1", f1)?;
    require_positive("f2", f2)?;
    require_positive("volume", volume)?;
    let b = mat.bulk_modulus_coeff;
    Ok((HBAR * f1 / (8.0 * b * volume)).sqrt() * (HBAR * f2 / (2.0 * b * volume)).sqrt() * omega * mat.g2)
}

/// Ratio p/g′ for uniform modes, `√(ħf/2ρ₀v_s²V)·g₂/g₁`.
pub fn quadratic_suppression(mat: &MaterialCoefficients, f: f64, volume: f64) -> Result<f64> {
    require_positive("f", f)?;
    require_positive("volume", volume)?;
    Ok((HBAR * f / (2.0 * mat.bulk_modulus_coeff * volume)).sqrt() * mat.g2 / mat.g1)
}

pub type LinearIndex = (usize, usize, usize);
pub type QuadraticIndex = (usize, usize, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTensor {
    /// g′_ijl, rad/s.
    pub linear: BTreeMap<LinearIndex, f64>,
    /// p_ijl₁l₂ with l₁ ≤ l₂, rad/s.
    pub quadratic: BTreeMap<QuadraticIndex, f64>,
    pub metadata: CouplingMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMetadata {
    pub optical_frequencies: Vec<f64>,
    pub acoustic_frequencies: Vec<f64>,
    pub material: Option<MaterialCoefficients>,
    pub polarization: f64,
}

impl CouplingTensor {
    /// Evaluates every g′_ijl (and p_ijl₁l₂ if requested) by quadrature.
    /// Independent elements are computed in parallel; the result does not
    /// depend on evaluation order.
    pub fn compute(
        mat: &MaterialCoefficients,
        optical: &[ModeFunction],
        acoustic: &[ModeFunction],
        options: CouplingOptions,
    ) -> Result<Self> {
        options.validate()?;
        let (n_opt, n_ac) = (optical.len(), acoustic.len());
        let linear_keys: Vec<LinearIndex> = (0..n_opt)
            .flat_map(|i| (0..n_opt).flat_map(move |j| (0..n_ac).map(move |l| (i, j, l))))
            .collect();
        let linear = linear_keys
            .par_iter()
            .map(|&(i, j, l)| {
                linear_coupling_element_with(mat, &optical[i], &optical[j], &acoustic[l], options.polarization)
                    .map(|g| ((i, j, l), g))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;

        let quadratic = if options.include_quadratic {
            let keys: Vec<QuadraticIndex> = (0..n_opt)
                .flat_map(|i| {
                    (0..n_opt).flat_map(move |j| (0..n_ac).flat_map(move |l1| (l1..n_ac).map(move |l2| (i, j, l1, l2))))
                })
                .collect();
            keys.par_iter()
                .map(|&(i, j, l1, l2)| {
                    quadratic_coupling_element_with(
                        mat,
                        &optical[i],
                        &optical[j],
                        &acoustic[l1],
                        &acoustic[l2],
                        options.polarization,
                    )
                    .map(|p| ((i, j, l1, l2), p))
                })
                .collect::<Result<BTreeMap<_, _>>>()?
        } else {
            BTreeMap::new()
        };

        Ok(Self {
            linear,
            quadratic,
            metadata: CouplingMetadata {
                optical_frequencies: optical.iter().map(|m| m.frequency).collect(),
                acoustic_frequencies: acoustic.iter().map(|m| m.frequency).collect(),
                material: Some(*mat),
                polarization: options.polarization,
            },
        })
    }

    /// Tensor with every linear element equal to `g`, the degenerate
    /// identical-profile case.
    pub fn uniform(g: f64, optical_frequencies: &[f64], acoustic_frequencies: &[f64]) -> Result<Self> {
        require_non_negative("g", g.abs())?;
        let (n_opt, n_ac) = (optical_frequencies.len(), acoustic_frequencies.len());
        let mut linear = BTreeMap::new();
        for i in 0..n_opt {
            for j in 0..n_opt {
                for l in 0..n_ac {
                    linear.insert((i, j, l), g);
                }
            }
        }
        Ok(Self {
            linear,
            quadratic: BTreeMap::new(),
            metadata: CouplingMetadata {
                optical_frequencies: optical_frequencies.to_vec(),
                acoustic_frequencies: acoustic_frequencies.to_vec(),
                material: None,
                polarization: 1.0,
            },
        })
    }

    pub fn linear_element(&self, i: usize, j: usize, l: usize) -> Result<f64> {
        self.linear
            .get(&(i, j, l))
            .copied()
            .ok_or_else(|| Error::MissingCoupling(format!("g'({i},{j},{l})")))
    }

    /// p_ijl₁l₂ with the phonon pair looked up in either order.
    pub fn quadratic_element(&self, i: usize, j: usize, l1: usize, l2: usize) -> Result<f64> {
        let (a, b) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        self.quadratic
            .get(&(i, j, a, b))
            .copied()
            .ok_or_else(|| Error::MissingCoupling(format!("p({i},{j},{l1},{l2})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::optical_angular_frequency;
    use crate::material::FluidProperties;
    use crate::modes::{box_mode, uniform_mode};
    use proptest::prelude::*;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn mat() -> MaterialCoefficients {
        MaterialCoefficients::new(&FluidProperties::helium4()).unwrap()
    }

    fn fiber() -> (f64, f64, f64) {
        (optical_angular_frequency(1e-6), TWO_PI * 1e7, 1e-14)
    }

    #[test]
    fn uniform_estimate_reproduces_fiber_cavity_numbers() {
        let (w, f, v) = fiber();
        let m = mat();
        let g = linear_coupling_uniform_estimate(&m, w, f, v).unwrap();
        assert!((g / m.g1 / (TWO_PI * 30e3) - 1.0).abs() < 0.05);
        assert!((g / (TWO_PI * 1.8e3) - 1.0).abs() < 0.05);
        assert!((g / (TWO_PI * 1.75e3) - 1.0).abs() < 0.05);
    }

    #[test]
    fn quadrature_matches_closed_form_on_uniform_modes() {
        let (w, f, v) = fiber();
        let m = mat();
        let u = uniform_mode(ModeKind::Optical, v, w).unwrap();
        let psi = uniform_mode(ModeKind::Acoustic, v, f).unwrap();
        let quad = linear_coupling_element(&m, &u, &u, &psi).unwrap();
        let closed = linear_coupling_uniform_estimate(&m, w, f, v).unwrap();
        assert!((quad / closed - 1.0).abs() < 1e-10);

        let pq = quadratic_coupling_element(&m, &u, &u, &psi, &psi).unwrap();
        let pc = quadratic_coupling_uniform_estimate(&m, w, f, f, v).unwrap();
        assert!((pq / pc - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadruple_volume_halves_coupling() {
        let (w, f, v) = fiber();
        let m = mat();
        let a = linear_coupling_uniform_estimate(&m, w, f, v).unwrap();
        let b = linear_coupling_uniform_estimate(&m, w, f, 4.0 * v).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_optical_modes_do_not_couple_through_uniform_phonon() {
        let m = mat();
        let (l, a) = (1e-5, 1e-9);
        let u1 = box_mode(ModeKind::Optical, l, a, 1, 3e8).unwrap();
        let u2 = box_mode(ModeKind::Optical, l, a, 2, 3e8).unwrap();
        let psi = uniform_mode(ModeKind::Acoustic, l * a, 1e7).unwrap();
        let diag = linear_coupling_element(&m, &u1, &u1, &psi).unwrap();
        let cross = linear_coupling_element(&m, &u1, &u2, &psi).unwrap();
        assert!(cross.abs() < 1e-9 * diag.abs());
    }

    #[test]
    fn odd_phonon_mode_does_not_shift_symmetric_photon() {
        let m = mat();
        let (l, a) = (1e-5, 1e-9);
        let u = box_mode(ModeKind::Optical, l, a, 1, 3e8).unwrap();
        let psi1 = box_mode(ModeKind::Acoustic, l, a, 1, 238.0).unwrap();
        let psi2 = box_mode(ModeKind::Acoustic, l, a, 2, 238.0).unwrap();
        let reference = linear_coupling_element(&m, &u, &u, &psi1).unwrap();
        let g = linear_coupling_element(&m, &u, &u, &psi2).unwrap();
        // Independent check of the integral by a fine midpoint sum.
        let n = 200_000;
        let mid: f64 = (0..n)
            .map(|k| {
                let s = (k as f64 + 0.5) / n as f64;
                let p = std::f64::consts::PI * s;
                2.0 * p.sin().powi(2) * std::f64::consts::SQRT_2 * (2.0 * p).sin()
            })
            .sum::<f64>()
            / n as f64;
        assert!(mid.abs() < 1e-9);
        assert!(g.abs() < 1e-9 * reference.abs());
    }

    #[test]
    fn suppression_ratio_is_a_few_times_1e_minus_12() {
        let (w, f, v) = fiber();
        let m = mat();
        let s = quadratic_suppression(&m, f, v).unwrap();
        assert!((s / 3.83e-12 - 1.0).abs() < 0.01, "{s}");
        let ratio = quadratic_coupling_uniform_estimate(&m, w, f, f, v).unwrap()
            / linear_coupling_uniform_estimate(&m, w, f, v).unwrap();
        assert!((ratio / s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_g2_gives_no_quadratic_coupling() {
        let m = MaterialCoefficients { g2: 0.0, ..mat() };
        let u = uniform_mode(ModeKind::Optical, 1e-14, 1e15).unwrap();
        let psi = uniform_mode(ModeKind::Acoustic, 1e-14, 1e7).unwrap();
        assert_eq!(quadratic_coupling_element(&m, &u, &u, &psi, &psi).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_element_is_symmetric_in_phonon_pair() {
        let m = mat();
        let (l, a) = (1e-5, 1e-9);
        let u = box_mode(ModeKind::Optical, l, a, 3, 3e8).unwrap();
        let p1 = box_mode(ModeKind::Acoustic, l, a, 2, 238.0).unwrap();
        let p2 = ModeFunction {
            geometry: crate::modes::Geometry::Box { n: 4 },
            ..p1.clone()
        };
        let ab = quadratic_coupling_element(&m, &u, &u, &p1, &p2).unwrap();
        let ba = quadratic_coupling_element(&m, &u, &u, &p2, &p1).unwrap();
        assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1e-300));
    }

    #[test]
    fn tensor_is_symmetric_in_photon_pair() {
        let m = mat();
        let (l, a) = (1e-5, 1e-9);
        let optical: Vec<_> = (1..=3)
            .map(|n| box_mode(ModeKind::Optical, l, a, n, 3e8).unwrap())
            .collect();
        let acoustic: Vec<_> = (1..=2)
            .map(|n| box_mode(ModeKind::Acoustic, l, a, n, 238.0).unwrap())
            .collect();
        let options = CouplingOptions {
            include_quadratic: true,
            ..Default::default()
        };
        let t = CouplingTensor::compute(&m, &optical, &acoustic, options).unwrap();
        assert_eq!(t.linear.len(), 18);
        assert_eq!(t.quadratic.len(), 27);
        let scale = t.linear.values().fold(0.0f64, |a, v| a.max(v.abs()));
        for (&(i, j, l), g) in &t.linear {
            assert!((g - t.linear[&(j, i, l)]).abs() < 1e-12 * scale);
        }
        assert_eq!(
            t.quadratic_element(0, 1, 1, 0).unwrap(),
            t.quadratic_element(0, 1, 0, 1).unwrap()
        );
        assert!(matches!(t.linear_element(5, 0, 0), Err(Error::MissingCoupling(_))));
    }

    #[test]
    fn polarization_scales_linearly() {
        let (w, f, v) = fiber();
        let m = mat();
        let u = uniform_mode(ModeKind::Optical, v, w).unwrap();
        let psi = uniform_mode(ModeKind::Acoustic, v, f).unwrap();
        let full = linear_coupling_element_with(&m, &u, &u, &psi, 1.0).unwrap();
        let half = linear_coupling_element_with(&m, &u, &u, &psi, 0.5).unwrap();
        assert!((half / full - 0.5).abs() < 1e-15);
        assert!(CouplingOptions {
            polarization: 1.5,
            include_quadratic: false
        }
        .validate()
        .is_err());
    }

    #[test]
    fn quantization_scales_increase_with_frequency() {
        let m = mat();
        assert_eq!(photon_scale(0.0), 0.0);
        assert_eq!(phonon_scale(&m, 0.0), 0.0);
        assert!(photon_scale(2.0) > photon_scale(1.0));
        assert!(phonon_scale(&m, 2.0) > phonon_scale(&m, 1.0));
    }

    proptest! {
        #[test]
        fn closed_form_scaling_laws(
            w in 1e14f64..1e16, f in 1e5f64..1e9, v in 1e-18f64..1e-10, s in 1.5f64..10.0
        ) {
            let m = mat();
            let g = linear_coupling_uniform_estimate(&m, w, f, v).unwrap();
            let gw = linear_coupling_uniform_estimate(&m, s * w, f, v).unwrap();
            let gf = linear_coupling_uniform_estimate(&m, w, s * f, v).unwrap();
            let gv = linear_coupling_uniform_estimate(&m, w, f, s * v).unwrap();
            prop_assert!((gw / g / s - 1.0).abs() < 1e-13);
            prop_assert!((gf / g / s.sqrt() - 1.0).abs() < 1e-13);
            prop_assert!((gv / g * s.sqrt() - 1.0).abs() < 1e-13);
        }
    }
}
