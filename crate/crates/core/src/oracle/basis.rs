use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ModeRef;

/// Default cap on the number of basis states.
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Product Fock basis with a maximum occupation per mode.
///
/// Slots are ordered photon modes first, then phonon modes. States are
/// enumerated lexicographically with the first slot most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockBasis {
    limits: Vec<usize>,
    n_optical: usize,
    strides: Vec<usize>,
    dimension: usize,
}

impl FockBasis {
    pub fn new(optical_limits: &[usize], acoustic_limits: &[usize], cap: usize) -> Result<Self> {
        let limits: Vec<usize> = optical_limits.iter().chain(acoustic_limits).copied().collect();
        let dimension: u128 = limits.iter().map(|&l| l as u128 + 1).product();
        if dimension > cap as u128 {
            return Err(Error::DimensionOverflow { dimension, cap });
        }
        let mut strides = vec![1usize; limits.len()];
        for k in (0..limits.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (limits[k + 1] + 1);
        }
        Ok(Self {
            limits,
            n_optical: optical_limits.len(),
            strides,
            dimension: dimension as usize,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn limits(&self) -> &[usize] {
        &self.limits
    }

    pub fn n_optical(&self) -> usize {
        self.n_optical
    }

    pub fn n_acoustic(&self) -> usize {
        self.limits.len() - self.n_optical
    }

    pub fn contains(&self, mode: ModeRef) -> bool {
        match mode {
            ModeRef::Optical(i) => i < self.n_optical,
            ModeRef::Acoustic(l) => l < self.n_acoustic(),
        }
    }

    pub fn slot(&self, mode: ModeRef) -> usize {
        match mode {
            ModeRef::Optical(i) => i,
            ModeRef::Acoustic(l) => self.n_optical + l,
        }
    }

    /// Index of an occupation tuple, or `None` if it lies outside the truncation.
    pub fn index(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.limits.len() {
            return None;
        }
        let mut idx = 0;
        for ((&n, &limit), &stride) in occupations.iter().zip(&self.limits).zip(&self.strides) {
            if n > limit {
                return None;
            }
            idx += n * stride;
        }
        Some(idx)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.limits.len()];
        self.fill_occupations(index, &mut occ);
        occ
    }

    pub(crate) fn fill_occupations(&self, mut index: usize, out: &mut [usize]) {
        for (k, &stride) in self.strides.iter().enumerate() {
            out[k] = index / stride;
            index %= stride;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dimension).map(|i| self.occupations(i))
    }
}

/// Complex amplitudes over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dimension: usize) -> Self {
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); dimension],
        }
    }

    /// The basis state with the given occupations.
    pub fn basis_state(basis: &FockBasis, occupations: &[usize]) -> Result<Self> {
        let idx = basis.index(occupations).ok_or_else(|| {
            Error::invalid(
                "occupations",
                format!("{occupations:?} lies outside truncation {:?}", basis.limits()),
            )
        })?;
        let mut s = Self::zeros(basis.dimension());
        s.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn population(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}
