//! Optomechanics of superfluid helium in an optical cavity.
//!
//! * [`material`]: permittivity, electrostrictive couplings and the pressure
//!   expansion of the fluid.
//! * [`modes`]: normalized mode functions and their overlap integrals.
//! * [`coupling`]: linear and two-phonon photon–phonon coupling elements.
//! * [`hamiltonian`]: the rotating-frame interaction as a symbolic term list.
//! * [`rates`]: golden-rule one- and two-phonon upconversion rates.
//! * [`oracle`]: exact evolution on a truncated Fock space, used to check
//!   the rate formulas.

pub mod constants;
pub mod coupling;
pub mod error;
pub mod hamiltonian;
pub mod material;
pub mod modes;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod rates;

pub use coupling::{CouplingOptions, CouplingTensor};
pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianTerm, ModeSpectrum, Monomial, Process};
pub use material::{FluidProperties, MaterialCoefficients};
pub use modes::{ModeFunction, ModeKind};
pub use rates::{Broadening, RateConfig, RateResult, RatioMode};
