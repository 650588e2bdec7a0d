//! Brute-force validation on a truncated Fock space.
//!
//! Hamiltonian terms are realised as sparse matrices over a product basis
//! and evolved exactly; golden-rule predictions are then compared against
//! the evolved amplitudes.

pub mod basis;
pub mod checks;
pub mod matrix;
pub mod propagate;

pub use basis::{FockBasis, StateVector, DEFAULT_DIMENSION_CAP};
pub use checks::{
    default_scan, first_order_check, occupation_scaling_check, pathway_monomials, second_order_check,
    CancellationRecord, FirstOrderRecord, OracleSettings, PathwayAmplitude, PathwayScan, ScalingRecord, ScanPoint,
    SecondOrderRecord, TransferSample,
};
pub use matrix::{apply_monomial, build_matrix, SparseMatrix, HERMITICITY_TOLERANCE};
pub use propagate::{
    evolve, ChebyshevPropagator, EvolveOptions, Method, SpectralPropagator, Trajectory, NORM_TOLERANCE,
};
