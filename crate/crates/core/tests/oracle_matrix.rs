use heliomech_core::hamiltonian::{assemble, ModeRef, Monomial, Process};
use heliomech_core::oracle::{build_matrix, second_order_check, FockBasis, OracleSettings};
use heliomech_core::{presets, CouplingTensor, HamiltonianTerm, ModeSpectrum};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Truncated annihilation operator on one mode.
fn lowering(limit: usize) -> DMatrix<f64> {
    let d = limit + 1;
    DMatrix::from_fn(d, d, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

fn kron_chain(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, m| acc.kronecker(m))
}

/// Operator on the full product space acting as `op` on slot `k`.
fn embed(op: &DMatrix<f64>, k: usize, limits: &[usize]) -> DMatrix<f64> {
    let factors: Vec<DMatrix<f64>> = limits
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            if s == k {
                op.clone()
            } else {
                DMatrix::identity(n + 1, n + 1)
            }
        })
        .collect();
    kron_chain(&factors)
}

fn dense_hamiltonian(terms: &[HamiltonianTerm], n_optical: usize, limits: &[usize]) -> DMatrix<f64> {
    let dim: usize = limits.iter().map(|n| n + 1).product();
    let mut h = DMatrix::zeros(dim, dim);
    for t in terms {
        let mut m = DMatrix::identity(dim, dim);
        for l in t.signature.factors() {
            let k = match l.mode {
                ModeRef::Optical(i) => i,
                ModeRef::Acoustic(j) => n_optical + j,
            };
            let a = lowering(limits[k]);
            let op = if l.create { a.transpose() } else { a };
            m *= embed(&op, k, limits);
        }
        h += m * t.coefficient;
    }
    h
}

fn spectrum_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(50.0..150.0f64, 1..=3),
        prop::collection::vec(1.0..10.0f64, 1..=2),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sparse_builder_matches_kronecker_construction(
        (opt, ac) in spectrum_strategy(),
        g in 0.01..0.5f64,
        p in 0.0..0.05f64,
        limit in 1usize..=2,
    ) {
        let spectrum = ModeSpectrum::new(opt.clone(), ac.clone());
        let mut tensor = CouplingTensor::uniform(g, &opt, &ac).unwrap();
        for i in 0..opt.len() {
            for j in 0..opt.len() {
                for l1 in 0..ac.len() {
                    for l2 in l1..ac.len() {
                        tensor.quadratic.insert((i, j, l1, l2), p * (1.0 + (i + 2 * j + l1 + l2) as f64 / 7.0));
                    }
                }
            }
        }
        let terms = assemble(&tensor, &spectrum, true).unwrap();
        let limits: Vec<usize> = vec![limit; opt.len() + ac.len()];
        let basis = FockBasis::new(&limits[..opt.len()], &limits[opt.len()..], 10_000).unwrap();
        let sparse = build_matrix(&terms, &basis).unwrap().to_dense();
        let dense = dense_hamiltonian(&terms, opt.len(), &limits);
        let scale = dense.amax().max(1.0);
        prop_assert!((sparse - &dense).amax() <= 1e-12 * scale);
        prop_assert!((&dense - dense.transpose()).amax() <= 1e-12 * scale);
    }

    #[test]
    fn photon_number_is_conserved((opt, ac) in spectrum_strategy(), g in 0.01..1.0f64) {
        let spectrum = ModeSpectrum::new(opt.clone(), ac.clone());
        let tensor = CouplingTensor::uniform(g, &opt, &ac).unwrap();
        let terms = assemble(&tensor, &spectrum, false).unwrap();
        let basis = FockBasis::new(&vec![2; opt.len()], &vec![2; ac.len()], 10_000).unwrap();
        let h = build_matrix(&terms, &basis).unwrap();
        let photons: Vec<f64> = basis
            .iter()
            .map(|occ| occ[..opt.len()].iter().sum::<usize>() as f64)
            .collect();
        prop_assert_eq!(h.commutator_with_diagonal(&photons), 0.0);
    }
}

#[test]
fn rotating_wave_terms_conserve_upper_photons_plus_phonons() {
    let spectrum = ModeSpectrum::new(vec![100.0, 103.0], vec![3.0]);
    let tensor = CouplingTensor::uniform(0.2, &spectrum.optical, &spectrum.acoustic).unwrap();
    let terms: Vec<HamiltonianTerm> = assemble(&tensor, &spectrum, false)
        .unwrap()
        .into_iter()
        .filter(|t| {
            matches!(
                t.process,
                Process::Upconversion | Process::Downconversion | Process::Free
            )
        })
        .collect();
    assert_eq!(terms.len(), 5);
    let basis = FockBasis::new(&[3, 3], &[3], 10_000).unwrap();
    let h = build_matrix(&terms, &basis).unwrap();
    let conserved: Vec<f64> = basis.iter().map(|occ| (occ[1] + occ[2]) as f64).collect();
    assert_eq!(h.commutator_with_diagonal(&conserved), 0.0);
    let total: Vec<f64> = basis.iter().map(|occ| (occ[0] + occ[1]) as f64).collect();
    assert_eq!(h.commutator_with_diagonal(&total), 0.0);
    let up: Monomial = "a2† a1 b1".parse().unwrap();
    assert!(terms
        .iter()
        .any(|t| t.signature == up && t.process == Process::Upconversion));
}

#[test]
fn second_order_amplitude_is_stable_under_truncation() {
    let cfg = presets::desk_two_phonon();
    let settings = OracleSettings::default();
    let wider = OracleSettings {
        truncation_extra: settings.truncation_extra + 1,
        ..settings
    };
    let detuning = [0.6 * cfg.f1];
    let base = second_order_check(&cfg, &detuning, &settings).unwrap();
    let wide = second_order_check(&cfg, &detuning, &wider).unwrap();
    let (a, b) = (base.scan[0].measured_amplitude, wide.scan[0].measured_amplitude);
    assert!(wide.dimension > base.dimension);
    assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
}
