//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with an `n`-point Gauss–Legendre rule and compared
//! against the sum over its two halves. Panels whose two estimates disagree by
//! more than their share of the tolerance are bisected again.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 15-point rule used by the adaptive driver.
    pub fn default_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(15))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
    /// Upper bound on the number of accepted panels.
    pub max_panels: usize,
}

impl Tolerance {
    pub fn absolute(absolute: f64) -> Self {
        Self {
            absolute,
            relative: 0.0,
            max_panels: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum of the per-panel |coarse - fine| differences.
    pub error_estimate: f64,
    pub panels: usize,
    pub evaluations: usize,
}

/// Integrates `f` over [a, b] to the requested tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

/// Integrates over consecutive intervals `points[k]..points[k+1]`, so that
/// integrands with kinks at known locations converge quickly.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadratureResult> {
    if points.len() < 2 {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }
    let rule = GaussLegendre::default_rule();
    let a = points[0];
    let b = points[points.len() - 1];
    let span = (b - a).abs();

    let mut stack: Vec<(f64, f64, f64)> = points
        .windows(2)
        .map(|w| (w[0], w[1], rule.integrate(&f, w[0], w[1])))
        .collect();
    stack.reverse();

    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    let mut evaluations = rule.len() * (points.len() - 1);

    while let Some((lo, hi, coarse)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&f, lo, mid);
        let right = rule.integrate(&f, mid, hi);
        evaluations += 2 * rule.len();
        let fine = left + right;
        let diff = (fine - coarse).abs();
        let share = if span > 0.0 { (hi - lo).abs() / span } else { 1.0 };
        let allowed = (tol.absolute * share).max(tol.relative * fine.abs());
        // Panels too narrow to bisect meaningfully are accepted as-is.
        let unsplittable = mid <= lo.min(hi) || mid >= lo.max(hi);
        if diff <= allowed || unsplittable || panels + stack.len() >= tol.max_panels {
            value += fine;
            error += diff;
            panels += 1;
            if diff > allowed && !unsplittable {
                // Budget exhausted with this panel still unresolved.
                let remaining: f64 = stack
                    .iter()
                    .map(|&(l, h, c)| (rule.integrate(&f, l, h) - c).abs())
                    .sum();
                return Err(Error::Quadrature {
                    achieved: error + remaining,
                    requested: tol.absolute.max(tol.relative * value.abs()),
                });
            }
        } else {
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
    }

    Ok(QuadratureResult {
        value,
        error_estimate: error,
        panels,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // Exact through degree 2n-1 = 9.
        let value = rule.integrate(&|x: f64| x.powi(8) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((value - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = rule.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let rule = GaussLegendre::new(15);
        let nodes = rule.nodes();
        for i in 0..nodes.len() {
            assert!((nodes[i] + nodes[nodes.len() - 1 - i]).abs() < 1e-15);
        }
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_handles_oscillatory_integrand() {
        let r = integrate(|x| (40.0 * x).sin().powi(2), 0.0, 1.0, Tolerance::absolute(1e-13)).unwrap();
        let exact = 0.5 - (80.0f64).sin() / 160.0;
        assert!((r.value - exact).abs() < 1e-12, "{} vs {}", r.value, exact);
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let r = integrate_with_breakpoints(f, &[0.0, 0.3, 1.0], Tolerance::absolute(1e-14)).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn exhausted_budget_reports_achieved_error() {
        let tol = Tolerance {
            absolute: 1e-15,
            relative: 0.0,
            max_panels: 2,
        };
        let err = integrate(|x| (200.0 * x).sin() * x.exp(), 0.0, 10.0, tol).unwrap_err();
        match err {
            Error::Quadrature { achieved, requested } => {
                assert!(achieved > requested);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
