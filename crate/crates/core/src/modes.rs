//! Normalized optical and acoustic mode functions.
//!
//! A mode lives in a slab of length `L` along z and transverse area `A`; its
//! profile depends on z only. Profiles are stored as a dimensionless shape
//! `s ↦ shape(s)` on `s = z/L ∈ [0, 1]` with `∫₀¹ shape² ds = 1`, so that the
//! physical profile `shape(z/L)/√V` satisfies `∫|profile|² d³r = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::quadrature::{self, Tolerance};

/// Absolute tolerance on dimensionless overlap integrals.
pub const OVERLAP_TOLERANCE: f64 = 1e-13;

/// Off-diagonal Gram entries above this are flagged as non-orthogonal.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Optical,
    Acoustic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Geometry {
    /// Constant profile `1/√V`.
    Uniform,
    /// Hard-wall standing wave `√(2/V) sin(nπz/L)`.
    Box { n: u32 },
    /// Piecewise-linear interpolant of equally spaced samples on [0, L].
    Grid { samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeFunction {
    pub kind: ModeKind,
    pub geometry: Geometry,
    /// Angular frequency, rad/s.
    pub frequency: f64,
    /// Length along z, m.
    pub length: f64,
    /// Transverse area, m².
    pub area: f64,
    /// Phase speed of the Helmholtz relation, m/s. Absent for uniform modes.
    pub speed: Option<f64>,
    pub index: u32,
}

/// Canonical hard-wall mode: frequency `nπ·speed/L`.
pub fn box_mode(kind: ModeKind, length: f64, area: f64, n: u32, speed: f64) -> Result<ModeFunction> {
    require_positive("length", length)?;
    require_positive("area", area)?;
    require_positive("speed", speed)?;
    if n == 0 {
        return Err(Error::invalid("n", "box mode index must be >= 1"));
    }
    Ok(ModeFunction {
        kind,
        geometry: Geometry::Box { n },
        frequency: n as f64 * std::f64::consts::PI * speed / length,
        length,
        area,
        speed: Some(speed),
        index: n,
    })
}

/// Spatially uniform mode `1/√V`. The slab is taken as a cube of volume V.
pub fn uniform_mode(kind: ModeKind, volume: f64, frequency: f64) -> Result<ModeFunction> {
    require_positive("volume", volume)?;
    require_positive("frequency", frequency)?;
    let length = volume.cbrt();
    Ok(ModeFunction {
        kind,
        geometry: Geometry::Uniform,
        frequency,
        length,
        area: volume / length,
        speed: None,
        index: 0,
    })
}

/// Mode sampled on an equally spaced grid over [0, L]; the samples are
/// rescaled so the interpolant is normalized.
pub fn grid_mode(
    kind: ModeKind,
    length: f64,
    area: f64,
    frequency: f64,
    speed: f64,
    samples: Vec<f64>,
) -> Result<ModeFunction> {
    require_positive("length", length)?;
    require_positive("area", area)?;
    require_positive("frequency", frequency)?;
    require_positive("speed", speed)?;
    if samples.len() < 2 {
        return Err(Error::invalid("samples", "need at least two grid samples"));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples", "grid samples must be finite"));
    }
    let mut mode = ModeFunction {
        kind,
        geometry: Geometry::Grid { samples },
        frequency,
        length,
        area,
        speed: Some(speed),
        index: 0,
    };
    let norm = overlap_shapes(&[&mode, &mode])?;
    if norm <= 0.0 {
        return Err(Error::invalid("samples", "grid profile is identically zero"));
    }
    if let Geometry::Grid { samples } = &mut mode.geometry {
        let scale = norm.sqrt().recip();
        samples.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(mode)
}

impl ModeFunction {
    pub fn volume(&self) -> f64 {
        self.length * self.area
    }

    /// Dimensionless shape at `s = z/L`.
    pub fn shape(&self, s: f64) -> f64 {
        match &self.geometry {
            Geometry::Uniform => 1.0,
            Geometry::Box { n } => std::f64::consts::SQRT_2 * (*n as f64 * std::f64::consts::PI * s).sin(),
            Geometry::Grid { samples } => {
                let last = samples.len() - 1;
                let x = (s.clamp(0.0, 1.0)) * last as f64;
                let k = (x.floor() as usize).min(last - 1);
                let t = x - k as f64;
                samples[k] * (1.0 - t) + samples[k + 1] * t
            }
        }
    }

    /// Physical profile at position z, m^(-3/2).
    pub fn profile(&self, z: f64) -> f64 {
        self.shape(z / self.length) / self.volume().sqrt()
    }

    /// Wavenumber `frequency/speed`, 1/m; zero for uniform modes.
    pub fn wavenumber(&self) -> f64 {
        self.speed.map_or(0.0, |c| self.frequency / c)
    }

    fn depends_on_z(&self) -> bool {
        !matches!(self.geometry, Geometry::Uniform)
    }

    fn knots(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Grid { samples } => {
                let last = (samples.len() - 1) as f64;
                (0..samples.len()).map(|k| k as f64 / last).collect()
            }
            _ => vec![0.0, 1.0],
        }
    }
}

/// Checks that the modes can be integrated together and returns the common
/// volume.
pub fn common_volume(modes: &[&ModeFunction]) -> Result<f64> {
    let first = modes
        .first()
        .ok_or_else(|| Error::invalid("modes", "at least one mode is required"))?;
    let volume = first.volume();
    for m in modes {
        if ((m.volume() - volume) / volume).abs() > 1e-12 {
            return Err(Error::DomainMismatch(format!(
                "volumes differ: {} vs {} m^3",
                m.volume(),
                volume
            )));
        }
    }
    let mut lengths = modes.iter().filter(|m| m.depends_on_z()).map(|m| m.length);
    if let Some(l0) = lengths.next() {
        if let Some(l) = lengths.find(|l| ((l - l0) / l0).abs() > 1e-12) {
            return Err(Error::DomainMismatch(format!("slab lengths differ: {l} vs {l0} m")));
        }
    }
    Ok(volume)
}

/// `∫₀¹ Π shape_k(s) ds` for modes on a common domain.
pub fn overlap_shapes(modes: &[&ModeFunction]) -> Result<f64> {
    common_volume(modes)?;
    let mut points: Vec<f64> = modes.iter().flat_map(|m| m.knots()).collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let integrand = |s: f64| modes.iter().map(|m| m.shape(s)).product::<f64>();
    let r = quadrature::integrate_with_breakpoints(integrand, &points, Tolerance::absolute(OVERLAP_TOLERANCE))?;
    Ok(r.value)
}

/// `∫ Π profile_k d³r`, in m^(3 − 3k/2) for k modes.
pub fn overlap(modes: &[&ModeFunction]) -> Result<f64> {
    let volume = common_volume(modes)?;
    let shapes = overlap_shapes(modes)?;
    Ok(shapes * volume.powf(1.0 - 0.5 * modes.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<f64>>,
    /// Distinct pairs whose overlap exceeds [`ORTHOGONALITY_TOLERANCE`].
    pub non_orthogonal: Vec<(usize, usize)>,
}

impl GramMatrix {
    /// Largest deviation from the identity.
    pub fn identity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Pairwise overlaps `∫ u_i u_j d³r`.
pub fn gram_matrix(modes: &[ModeFunction]) -> Result<GramMatrix> {
    let refs: Vec<&ModeFunction> = modes.iter().collect();
    if !refs.is_empty() {
        common_volume(&refs)?;
    }
    let n = modes.len();
    let mut entries = vec![vec![0.0; n]; n];
    let mut non_orthogonal = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = overlap_shapes(&[&modes[i], &modes[j]])?;
            entries[i][j] = v;
            entries[j][i] = v;
            if i != j && v.abs() > ORTHOGONALITY_TOLERANCE {
                non_orthogonal.push((i, j));
            }
        }
    }
    Ok(GramMatrix {
        entries,
        non_orthogonal,
    })
}

/// RMS of `∇²u + k²u` on `points` interior grid nodes (second-order stencil),
/// relative to `k²·RMS(u)`.
pub fn helmholtz_residual(mode: &ModeFunction, points: usize) -> f64 {
    let k2 = mode.wavenumber().powi(2);
    let h = mode.length / (points + 1) as f64;
    let u = |i: usize| mode.profile(i as f64 * h);
    let mut res = 0.0;
    let mut norm = 0.0;
    for i in 1..=points {
        let lap = (u(i + 1) - 2.0 * u(i) + u(i - 1)) / (h * h);
        res += (lap + k2 * u(i)).powi(2);
        norm += (k2 * u(i)).powi(2);
    }
    (res / norm).sqrt()
}
