//! Liquid-helium material model.
//!
//! The permittivity follows the Clausius–Mossotti form
//! `ε(ρ)/ε₀ = (1 + 2x)/(1 − x)` with `x = (4π/3)(α_m/m)ρ`. The electrostrictive
//! couplings are the scaled first and second density derivatives at ρ₀,
//! `g₁ = (ρ₀/ε₀)∂ε/∂ρ` and `g₂ = (ρ₀²/2ε₀)∂²ε/∂ρ²`, which reduce to
//! `3x₀/(1−x₀)²` and `3x₀²/(1−x₀)³`.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::quadrature::{self, Tolerance};

/// Absolute tolerance on the enthalpy integral, J/kg.
pub const ENTHALPY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidProperties {
    /// Molar polarizability, m³/mol.
    pub alpha_m: f64,
    /// Molar mass, kg/mol.
    pub molar_mass: f64,
    /// Equilibrium mass density, kg/m³.
    pub rho0: f64,
    /// Sound speed, m/s.
    pub v_s: f64,
    /// Grüneisen constant `A₂/(2ρ₀v_s²)`.
    pub gruneisen: f64,
}

impl FluidProperties {
    /// Liquid ⁴He data: α_m = 1.23296e-7 m³/mol, m = 4.0026e-3 kg/mol,
    /// ρ₀ = 145.1397 kg/m³, v_s = 238 m/s, Grüneisen constant 2.84.
    pub const fn helium4() -> Self {
        Self {
            alpha_m: 1.23296e-7,
            molar_mass: 4.0026e-3,
            rho0: 145.1397,
            v_s: 238.0,
            gruneisen: 2.84,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("alpha_m", self.alpha_m)?;
        require_positive("molar_mass", self.molar_mass)?;
        require_positive("rho0", self.rho0)?;
        require_positive("v_s", self.v_s)?;
        require_positive("gruneisen", self.gruneisen)?;
        let x0 = self.clausius_mossotti(self.rho0);
        if x0 >= 1.0 {
            return Err(Error::Domain(format!(
                "Clausius-Mossotti parameter x0 = {x0} must be < 1"
            )));
        }
        Ok(())
    }

    /// `x(ρ) = (4π/3)(α_m/m)ρ`.
    pub fn clausius_mossotti(&self, rho: f64) -> f64 {
        4.0 * std::f64::consts::PI / 3.0 * (self.alpha_m / self.molar_mass) * rho
    }

    /// Density at which the permittivity diverges (x = 1), kg/m³.
    pub fn permittivity_pole(&self) -> f64 {
        1.0 / self.clausius_mossotti(1.0)
    }

    /// `ρ₀v_s²`, J/m³.
    pub fn bulk_modulus_coeff(&self) -> f64 {
        self.rho0 * self.v_s * self.v_s
    }
}

impl Default for FluidProperties {
    fn default() -> Self {
        Self::helium4()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialCoefficients {
    /// ε(ρ₀)/ε₀.
    pub eps_ratio0: f64,
    pub g1: f64,
    pub g2: f64,
    /// ρ₀v_s², J/m³.
    pub bulk_modulus_coeff: f64,
    /// Second pressure-expansion coefficient, J/m³.
    #[serde(rename = "A2")]
    pub a2: f64,
    /// Coefficient of ρ̃³ in the fluid energy density, `(A₂ − ρ₀v_s²)/6`, J/m³.
    pub cubic_phonon_coeff: f64,
    /// Equilibrium density carried along for the enthalpy integral, kg/m³.
    pub rho0: f64,
}

impl MaterialCoefficients {
    pub fn new(props: &FluidProperties) -> Result<Self> {
        props.validate()?;
        let eps_ratio0 = dielectric_constant(props, props.rho0)?;
        let (g1, g2) = optomech_couplings(props)?;
        let bulk = props.bulk_modulus_coeff();
        let a2 = exact_a2(props.gruneisen, bulk);
        Ok(Self {
            eps_ratio0,
            g1,
            g2,
            bulk_modulus_coeff: bulk,
            a2,
            cubic_phonon_coeff: (a2 - bulk) / 6.0,
            rho0: props.rho0,
        })
    }

    /// Grüneisen constant recovered from the coefficients.
    pub fn gruneisen(&self) -> f64 {
        self.a2 / (2.0 * self.bulk_modulus_coeff)
    }
}

/// `2γB`, moved by at most a few ulps so that `A₂/(2B)` returns `γ` exactly.
fn exact_a2(gruneisen: f64, bulk: f64) -> f64 {
    let a2 = 2.0 * gruneisen * bulk;
    let mut lo = a2;
    let mut hi = a2;
    for _ in 0..8 {
        for cand in [lo, hi] {
            if cand / (2.0 * bulk) == gruneisen {
                return cand;
            }
        }
        lo = lo.next_down();
        hi = hi.next_up();
    }
    a2
}

/// Relative permittivity ε(ρ)/ε₀.
pub fn dielectric_constant(props: &FluidProperties, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("density must be >= 0, got {rho}")));
    }
    let x = props.clausius_mossotti(rho);
    if x >= 1.0 {
        return Err(Error::Domain(format!(
            "density {rho} kg/m^3 is at or beyond the permittivity pole (x = {x})"
        )));
    }
    Ok((1.0 + 2.0 * x) / (1.0 - x))
}

/// Linear and quadratic electrostrictive couplings `(g₁, g₂)`.
pub fn optomech_couplings(props: &FluidProperties) -> Result<(f64, f64)> {
    let x0 = props.clausius_mossotti(props.rho0);
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::Domain(format!(
            "Clausius-Mossotti parameter x0 = {x0} must lie in [0, 1)"
        )));
    }
    let d = 1.0 - x0;
    Ok((3.0 * x0 / (d * d), 3.0 * x0 * x0 / (d * d * d)))
}

/// Pressure deviation `p − p₀ = ρ₀v_s²ρ̃ + ½A₂ρ̃²`, Pa.
pub fn pressure_deviation(coeffs: &MaterialCoefficients, rho_tilde: f64) -> Result<f64> {
    if !(rho_tilde.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "density deviation must satisfy |rho_tilde| < 1, got {rho_tilde}"
        )));
    }
    Ok(coeffs.bulk_modulus_coeff * rho_tilde + 0.5 * coeffs.a2 * rho_tilde * rho_tilde)
}

/// `W(ρ) = ∫_{ρ₀}^{ρ} p(ρ′)/ρ′² dρ′`, J/kg, by adaptive quadrature.
pub fn enthalpy_w(props: &FluidProperties, rho: f64) -> Result<f64> {
    let coeffs = MaterialCoefficients::new(props)?;
    enthalpy_w_with(&coeffs, rho)
}

pub fn enthalpy_w_with(coeffs: &MaterialCoefficients, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("density must be > 0, got {rho}")));
    }
    let rho0 = coeffs.rho0;
    let tilde = (rho - rho0) / rho0;
    if tilde.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "density {rho} is outside the pressure expansion range (|rho_tilde| < 1)"
        )));
    }
    if rho == rho0 {
        return Ok(0.0);
    }
    // Integrate in the dimensionless deviation s, where dρ′ = ρ₀ ds.
    let integrand = |s: f64| {
        let p = coeffs.bulk_modulus_coeff * s + 0.5 * coeffs.a2 * s * s;
        let r = 1.0 + s;
        p / (rho0 * r * r)
    };
    let tol = Tolerance::absolute(ENTHALPY_TOLERANCE);
    let r = quadrature::integrate(integrand, 0.0, tilde, tol)?;
    Ok(r.value)
}
