use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::StateVector;
use super::matrix::SparseMatrix;
use crate::error::{Error, Result};

/// Allowed |‖ψ‖ − 1| along a trajectory.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest dimension for which `Method::Auto` diagonalizes densely.
pub const SPECTRAL_LIMIT: usize = 2_000;

/// Exact propagator from a full eigendecomposition of a real symmetric H.
/// Unitary up to roundoff for any time step.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(h: &SparseMatrix) -> Self {
        let eig = SymmetricEigen::new(h.to_dense());
        Self {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn decompose(&self, psi: &StateVector) -> Vec<Complex64> {
        (0..self.dimension())
            .map(|k| {
                self.vectors
                    .column(k)
                    .iter()
                    .zip(&psi.amplitudes)
                    .map(|(&v, &a)| a * v)
                    .sum()
            })
            .collect()
    }

    pub fn state_at(&self, coeffs: &[Complex64], t: f64) -> StateVector {
        let mut out = StateVector::zeros(self.dimension());
        for (k, &c) in coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let phased = c * Complex64::from_polar(1.0, -self.energies[k] * t);
            for (o, &v) in out.amplitudes.iter_mut().zip(self.vectors.column(k).iter()) {
                *o += phased * v;
            }
        }
        out
    }

    /// Eigencomponents `(E_k, ⟨to|k⟩⟨k|from⟩)` with non-negligible weight, so
    /// that `⟨to|e^{−iHt}|from⟩ = Σ w_k e^{−iE_k t}`.
    pub fn transition_weights(&self, from: usize, to: usize) -> Vec<(f64, f64)> {
        (0..self.dimension())
            .map(|k| (self.energies[k], self.vectors[(to, k)] * self.vectors[(from, k)]))
            .filter(|&(_, w)| w.abs() > 1e-300)
            .collect()
    }

    /// `⟨to|e^{−iHt}|from⟩` at each time.
    pub fn transition_amplitudes(&self, from: usize, to: usize, times: &[f64]) -> Vec<Complex64> {
        let weights = self.transition_weights(from, to);
        times
            .iter()
            .map(|&t| weights.iter().map(|&(e, w)| Complex64::from_polar(w, -e * t)).sum())
            .collect()
    }
}

/// `e^{−iHdt}` as a Chebyshev series in the rescaled matrix, for matrices
/// too large to diagonalize. Only matrix–vector products are needed.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator<'a> {
    h: &'a SparseMatrix,
    center: f64,
    half_width: f64,
    coeffs: Vec<Complex64>,
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(h: &'a SparseMatrix, dt: f64) -> Self {
        let (lo, hi) = h.spectral_bounds();
        let center = 0.5 * (lo + hi);
        let half_width = (0.5 * (hi - lo)).max(1e-12) * 1.01;
        let x = half_width * dt;
        let bessel = bessel_j_sequence(x, (x + 12.0 * x.cbrt() + 40.0) as usize);
        let shift = Complex64::from_polar(1.0, -center * dt);
        let mut minus_i_pow = Complex64::new(1.0, 0.0);
        let mut coeffs = Vec::with_capacity(bessel.len());
        for (k, &j) in bessel.iter().enumerate() {
            let weight = if k == 0 { 1.0 } else { 2.0 };
            coeffs.push(shift * minus_i_pow * (weight * j));
            minus_i_pow *= Complex64::new(0.0, -1.0);
        }
        // Drop the tail once the Bessel coefficients are below roundoff.
        while coeffs.len() > 2 && coeffs.last().map(|c| c.norm()) < Some(1e-18) && coeffs.len() as f64 > x + 1.0 {
            coeffs.pop();
        }
        Self {
            h,
            center,
            half_width,
            coeffs,
        }
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    fn scaled_apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.h.mul_vec(x, out);
        let inv = 1.0 / self.half_width;
        for (o, &v) in out.iter_mut().zip(x) {
            *o = (*o - v * self.center) * inv;
        }
    }

    pub fn step(&self, psi: &mut StateVector) {
        let n = psi.len();
        let mut prev = psi.amplitudes.clone();
        let mut curr = vec![Complex64::new(0.0, 0.0); n];
        self.scaled_apply(&prev, &mut curr);
        let mut acc: Vec<Complex64> = prev.iter().map(|&v| v * self.coeffs[0]).collect();
        if self.coeffs.len() > 1 {
            for (a, &v) in acc.iter_mut().zip(&curr) {
                *a += v * self.coeffs[1];
            }
        }
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for c in &self.coeffs[2.min(self.coeffs.len())..] {
            self.scaled_apply(&curr, &mut next);
            for ((nx, &p), a) in next.iter_mut().zip(&prev).zip(acc.iter_mut()) {
                *nx = *nx * 2.0 - p;
                *a += *nx * *c;
            }
            std::mem::swap(&mut prev, &mut curr);
            std::mem::swap(&mut curr, &mut next);
        }
        psi.amplitudes = acc;
    }
}

/// J_0(x) … J_n(x) for x ≥ 0 by Miller's downward recurrence, normalized
/// with J_0 + 2ΣJ_2k = 1.
pub fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = {
        let m = n.max(x as usize) + 20 + (40.0 * x.max(1.0)).sqrt() as usize;
        m + (m & 1)
    };
    let mut j_next = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let mut tmp = vec![0.0; start + 1];
    tmp[start] = j;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j - j_next;
        j_next = j;
        j = j_prev;
        if j.abs() > 1e250 {
            // Rescale to keep the recurrence in range.
            for t in tmp.iter_mut().skip(k - 1) {
                *t *= 1e-250;
            }
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
        }
        tmp[k - 1] = j;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += tmp[0];
    for (o, t) in out.iter_mut().zip(&tmp) {
        *o = t / norm;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Spectral,
    Chebyshev,
    /// Spectral up to [`SPECTRAL_LIMIT`] states, Chebyshev beyond.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Record every `stride`-th step (the final state is always recorded).
    pub stride: usize,
    pub norm_tolerance: f64,
    pub method: Method,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            norm_tolerance: NORM_TOLERANCE,
            method: Method::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub max_norm_drift: f64,
    pub method: Method,
    /// dt·‖H‖ with ‖H‖ from the Gershgorin bound. Accuracy does not depend
    /// on it for either propagator; reported for reference.
    pub step_norm_product: f64,
}

/// Evolves `psi0` over `[0, total_time]` in steps no larger than `dt`.
pub fn evolve(
    h: &SparseMatrix,
    psi0: &StateVector,
    total_time: f64,
    dt: f64,
    options: EvolveOptions,
) -> Result<Trajectory> {
    if psi0.len() != h.dimension() {
        return Err(Error::invalid("psi0", "state and matrix dimensions differ"));
    }
    if !(total_time >= 0.0) || !(dt > 0.0) || !total_time.is_finite() {
        return Err(Error::invalid("dt", "time span must be >= 0 and step > 0"));
    }
    let stride = options.stride.max(1);
    let steps = ((total_time / dt) * (1.0 - 1e-12)).ceil().max(0.0) as usize;
    let step = if steps == 0 { 0.0 } else { total_time / steps as f64 };
    let (lo, hi) = h.spectral_bounds();
    let method = match options.method {
        Method::Auto if h.dimension() <= SPECTRAL_LIMIT => Method::Spectral,
        Method::Auto => Method::Chebyshev,
        m => m,
    };
    let norm0 = psi0.norm();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![psi0.clone()],
        max_norm_drift: 0.0,
        method,
        step_norm_product: step * lo.abs().max(hi.abs()),
    };
    let record = |traj: &mut Trajectory, k: usize, psi: StateVector| -> Result<()> {
        let t = k as f64 * step;
        let drift = (psi.norm() - norm0).abs();
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        if drift > options.norm_tolerance {
            return Err(Error::NormDrift {
                drift,
                tolerance: options.norm_tolerance,
                time: t,
            });
        }
        if k.is_multiple_of(stride) || k == steps {
            traj.times.push(t);
            traj.states.push(psi);
        }
        Ok(())
    };
    match method {
        Method::Spectral | Method::Auto => {
            let prop = SpectralPropagator::new(h);
            let coeffs = prop.decompose(psi0);
            for k in 1..=steps {
                if k.is_multiple_of(stride) || k == steps {
                    record(&mut traj, k, prop.state_at(&coeffs, k as f64 * step))?;
                }
            }
        }
        Method::Chebyshev => {
            let prop = ChebyshevPropagator::new(h, step);
            let mut psi = psi0.clone();
            for k in 1..=steps {
                prop.step(&mut psi);
                record(&mut traj, k, psi.clone())?;
            }
        }
    }
    Ok(traj)
}
