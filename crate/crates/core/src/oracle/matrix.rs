use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::FockBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianTerm, Monomial};

/// Largest accepted ‖H − Hᵀ‖/‖H‖ for an assembled matrix.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Real matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dimension: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dimension = rows.len();
        let mut row_ptr = Vec::with_capacity(dimension + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dimension,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dimension).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// ‖H − Hᵀ‖_F / ‖H‖_F (zero for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        // Every nonzero of H − Hᵀ is visited exactly once: at (r, c) when H
        // stores that entry, otherwise from the transposed side.
        let diff: f64 = (0..self.dimension)
            .into_par_iter()
            .map(|r| self.row(r).map(|(c, v)| (v - self.get(c, r)).powi(2)).sum::<f64>())
            .sum();
        diff.sqrt() / norm
    }

    /// ‖[H, N]‖_F / (‖H‖_F · max|N|) for a diagonal operator N.
    pub fn commutator_with_diagonal(&self, diag: &[f64]) -> f64 {
        let norm = self.frobenius_norm() * diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if norm == 0.0 {
            return 0.0;
        }
        let sum: f64 = (0..self.dimension)
            .map(|r| self.row(r).map(|(c, v)| (v * (diag[c] - diag[r])).powi(2)).sum::<f64>())
            .sum();
        sum.sqrt() / norm
    }

    /// Interval containing the spectrum, from Gershgorin discs.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dimension {
            let mut d = 0.0;
            let mut off = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    d = v;
                } else {
                    off += v.abs();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        if self.dimension == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// `out = self · x`.
    pub fn mul_vec(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.par_iter_mut().enumerate().for_each(|(r, o)| {
            *o = self.row(r).map(|(c, v)| x[c] * v).sum();
        });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for r in 0..self.dimension {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Applies a monomial (rightmost factor first) to an occupation tuple.
/// Returns the product of ladder factors, or `None` if the result vanishes
/// or leaves the truncated space.
pub fn apply_monomial(monomial: &Monomial, basis: &FockBasis, occupations: &mut [usize]) -> Option<f64> {
    // Integer product of the squared ladder factors; one square root at the
    // end keeps number operators exact.
    let mut squared = 1.0;
    for ladder in monomial.factors().iter().rev() {
        let k = basis.slot(ladder.mode);
        let n = occupations[k];
        if ladder.create {
            if n >= basis.limits()[k] {
                return None;
            }
            squared *= (n + 1) as f64;
            occupations[k] = n + 1;
        } else {
            if n == 0 {
                return None;
            }
            squared *= n as f64;
            occupations[k] = n - 1;
        }
    }
    Some(squared.sqrt())
}

/// Schrödinger-frame Hamiltonian matrix (rad/s, ħ = 1) on a truncated basis.
///
/// Row r collects ⟨r|T|c⟩ = (T†|r⟩)_c for every term, so rows are built
/// independently and in parallel. Fails if the term set is not closed
/// under conjugation.
pub fn build_matrix(terms: &[HamiltonianTerm], basis: &FockBasis) -> Result<SparseMatrix> {
    let n_slots = basis.limits().len();
    for t in terms {
        for l in t.signature.factors() {
            if !basis.contains(l.mode) {
                return Err(Error::invalid(
                    "terms",
                    format!("term `{}` acts on a mode outside the basis", t.signature),
                ));
            }
        }
    }
    let adjoints: Vec<(Monomial, f64)> = terms.iter().map(|t| (t.signature.adjoint(), t.coefficient)).collect();
    let rows: Vec<Vec<(usize, f64)>> = (0..basis.dimension())
        .into_par_iter()
        .map(|r| {
            let mut occ = vec![0; n_slots];
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for (adj, coef) in &adjoints {
                basis.fill_occupations(r, &mut occ);
                if let Some(amp) = apply_monomial(adj, basis, &mut occ) {
                    let c = basis.index(&occ).expect("ladder action stays within limits");
                    entries.push((c, coef * amp));
                }
            }
            entries.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            merged
        })
        .collect();
    let h = SparseMatrix::from_rows(rows);
    let residual = h.hermiticity_residual();
    if !(residual < HERMITICITY_TOLERANCE) {
        return Err(Error::NonHermitian { residual });
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{HamiltonianTerm, Ladder, ModeRef, ModeSpectrum};

    fn term(sig: &str, coef: f64, spectrum: &ModeSpectrum) -> HamiltonianTerm {
        HamiltonianTerm::new(sig.parse().unwrap(), coef, spectrum)
    }

    #[test]
    fn number_operator_is_diagonal() {
        let spectrum = ModeSpectrum::new(vec![2.5], vec![]);
        let basis = FockBasis::new(&[3], &[], 100).unwrap();
        let h = build_matrix(&[term("a1† a1", 2.5, &spectrum)], &basis).unwrap();
        assert_eq!(h.diagonal(), vec![0.0, 2.5, 5.0, 7.5]);
        assert_eq!(h.nnz(), 3);
    }

    #[test]
    fn dispersive_element_has_unit_ladder_factor() {
        let spectrum = ModeSpectrum::new(vec![10.0], vec![1.0]);
        let basis = FockBasis::new(&[1], &[2], 100).unwrap();
        let g = 0.3;
        let terms = [term("a1† a1 b1", -g, &spectrum), term("a1† a1 b1†", -g, &spectrum)];
        let h = build_matrix(&terms, &basis).unwrap();
        let row = basis.index(&[1, 1]).unwrap();
        let col = basis.index(&[1, 0]).unwrap();
        assert_eq!(h.get(row, col), -g);
        let two = basis.index(&[1, 2]).unwrap();
        assert_eq!(h.get(two, row), -g * 2f64.sqrt());
    }

    #[test]
    fn unpaired_term_is_rejected() {
        let spectrum = ModeSpectrum::new(vec![10.0, 11.0], vec![1.0]);
        let basis = FockBasis::new(&[1, 1], &[1], 100).unwrap();
        let err = build_matrix(&[term("a2† a1 b1", -0.1, &spectrum)], &basis).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn truncation_drops_states_beyond_limit() {
        let basis = FockBasis::new(&[1], &[], 100).unwrap();
        let mut occ = vec![1];
        let m = Monomial(vec![Ladder::create(ModeRef::Optical(0))]);
        assert_eq!(apply_monomial(&m, &basis, &mut occ), None);
    }

    #[test]
    fn spectral_bounds_enclose_eigenvalues() {
        let spectrum = ModeSpectrum::new(vec![10.0, 11.0], vec![1.0]);
        let basis = FockBasis::new(&[2, 2], &[2], 1000).unwrap();
        let tensor = crate::coupling::CouplingTensor::uniform(0.2, &spectrum.optical, &spectrum.acoustic).unwrap();
        let terms = crate::hamiltonian::assemble(&tensor, &spectrum, false).unwrap();
        let h = build_matrix(&terms, &basis).unwrap();
        let (lo, hi) = h.spectral_bounds();
        let eig = h.to_dense().symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e >= lo - 1e-12 && e <= hi + 1e-12));
    }
}
