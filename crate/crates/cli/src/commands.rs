//! Subcommand bodies. Each builds a JSON document and, where a natural
//! tabular form exists, a CSV table.

use std::f64::consts::PI;

use heliomech_core::coupling::{linear_coupling_uniform_estimate, quadratic_suppression};
use heliomech_core::hamiltonian::{assemble, classify_terms, hermitian_closure_violations};
use heliomech_core::oracle::{
    default_scan, first_order_check, occupation_scaling_check, second_order_check, FirstOrderRecord, ScalingRecord,
    SecondOrderRecord,
};
use heliomech_core::rates::{
    detuning_sweep, one_phonon_rate, paper_ratio_prefactor, photon_number_sweep, rate_ratio, symmetric_grid,
    two_phonon_rate, BracketBreakdown, SweepRow,
};
use heliomech_core::{
    Broadening, CouplingOptions, CouplingTensor, FluidProperties, MaterialCoefficients, ModeFunction, ModeSpectrum,
    RateConfig, RateResult, RatioMode,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{resolve_rates, OracleCheck, RunConfig, SweepParameter, DESK_ONE_PHONON, DESK_TWO_PHONON};
use crate::output::{format_number, q, Table};
use crate::CliError;

/// First-order deviation limit of the oracle summary.
pub const FIRST_ORDER_LIMIT: f64 = 0.01;
pub const SCALING_LIMIT: f64 = 0.02;
pub const SECOND_ORDER_LIMIT: f64 = 0.10;
pub const CANCELLATION_LIMIT: f64 = 1e-2;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub struct Rendered {
    pub json: Value,
    pub table: Option<Table>,
}

impl Rendered {
    fn json(json: Value) -> Self {
        Self { json, table: None }
    }
}

fn fluid_json(f: &FluidProperties) -> Value {
    json!({
        "alpha_m": q(f.alpha_m, "m^3/mol"),
        "molar_mass": q(f.molar_mass, "kg/mol"),
        "rho0": q(f.rho0, "kg/m^3"),
        "v_s": q(f.v_s, "m/s"),
        "gruneisen": q(f.gruneisen, "1"),
    })
}

pub fn material(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let fluid = cfg.fluid()?;
    let c = MaterialCoefficients::new(&fluid)?;
    Ok(Rendered::json(json!({
        "command": "material",
        "fluid": fluid_json(&fluid),
        "coefficients": {
            "eps_ratio": q(c.eps_ratio0, "1"),
            "g1": q(c.g1, "1"),
            "g2": q(c.g2, "1"),
            "bulk_modulus_coeff": q(c.bulk_modulus_coeff, "Pa"),
            "A2": q(c.a2, "Pa"),
            "cubic_phonon_coeff": q(c.cubic_phonon_coeff, "Pa"),
            "gruneisen": q(c.gruneisen(), "1"),
            "clausius_mossotti_x0": q(fluid.clausius_mossotti(fluid.rho0), "1"),
            "permittivity_pole": q(fluid.permittivity_pole(), "kg/m^3"),
        },
    })))
}

fn mode_json(index: usize, m: &ModeFunction) -> Value {
    json!({
        "index": index,
        "kind": m.kind,
        "geometry": m.geometry,
        "frequency": q(m.frequency, "rad/s"),
        "volume": q(m.volume(), "m^3"),
    })
}

fn coupling_tensor(
    cfg: &RunConfig,
    include_quadratic: bool,
) -> Result<(CouplingTensor, Vec<ModeFunction>, Vec<ModeFunction>), CliError> {
    let mat = MaterialCoefficients::new(&cfg.fluid()?)?;
    let (opt, ac) = cfg.modes()?;
    let options = CouplingOptions {
        polarization: cfg.coupling.polarization,
        include_quadratic,
    };
    let tensor = CouplingTensor::compute(&mat, &opt, &ac, options)?;
    Ok((tensor, opt, ac))
}

fn element_json(indices: &[usize], value: f64) -> Value {
    json!({
        "indices": indices,
        "value": q(value, "rad/s"),
        "value_over_2pi": q(value / (2.0 * PI), "Hz"),
    })
}

pub fn coupling(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let (tensor, opt, ac) = coupling_tensor(cfg, cfg.coupling.wants_quadratic())?;
    let mut table = Table::new(&["element", "i", "j", "l1", "l2", "value_rad_s"]);
    let linear_keys: Vec<[usize; 3]> = match &cfg.coupling.linear {
        Some(keys) => keys.clone(),
        None => tensor.linear.keys().map(|&(i, j, l)| [i, j, l]).collect(),
    };
    let mut linear = Vec::new();
    for [i, j, l] in linear_keys {
        let g = tensor
            .linear_element(i, j, l)
            .map_err(|e| CliError::Config(e.to_string()))?;
        linear.push(element_json(&[i, j, l], g));
        table.rows.push(vec![
            "linear".into(),
            i.to_string(),
            j.to_string(),
            l.to_string(),
            String::new(),
            format_number(g, cfg.output.precision),
        ]);
    }
    let mut quadratic = Vec::new();
    if cfg.coupling.wants_quadratic() {
        let keys: Vec<[usize; 4]> = match &cfg.coupling.quadratic {
            Some(keys) => keys.clone(),
            None => tensor.quadratic.keys().map(|&(i, j, a, b)| [i, j, a, b]).collect(),
        };
        for [i, j, l1, l2] in keys {
            let p = tensor
                .quadratic_element(i, j, l1, l2)
                .map_err(|e| CliError::Config(e.to_string()))?;
            quadratic.push(element_json(&[i, j, l1, l2], p));
            table.rows.push(vec![
                "quadratic".into(),
                i.to_string(),
                j.to_string(),
                l1.to_string(),
                l2.to_string(),
                format_number(p, cfg.output.precision),
            ]);
        }
    }
    let mut doc = json!({
        "command": "coupling",
        "polarization": q(cfg.coupling.polarization, "1"),
        "optical_modes": opt.iter().enumerate().map(|(k, m)| mode_json(k, m)).collect::<Vec<_>>(),
        "acoustic_modes": ac.iter().enumerate().map(|(k, m)| mode_json(k, m)).collect::<Vec<_>>(),
        "linear": linear,
        "quadratic": quadratic,
    });
    if cfg.modes.is_none() {
        // Closed-form estimates for the preset cavity.
        let cav = cfg.cavity()?;
        let mat = MaterialCoefficients::new(&cfg.fluid()?)?;
        let g = linear_coupling_uniform_estimate(&mat, cav.optical_frequency(), cav.phonon_frequency, cav.volume)?;
        doc["uniform_estimates"] = json!({
            "volume": q(cav.volume, "m^3"),
            "wavelength": q(cav.wavelength, "m"),
            "phonon_frequency": q(cav.phonon_frequency, "rad/s"),
            "g_prime": q(g, "rad/s"),
            "g_prime_over_2pi": q(g / (2.0 * PI), "Hz"),
            "g_prime_over_g1_over_2pi": q(g / mat.g1 / (2.0 * PI), "Hz"),
            "quadratic_suppression": q(quadratic_suppression(&mat, cav.phonon_frequency, cav.volume)?, "1"),
        });
    }
    Ok(Rendered {
        json: doc,
        table: Some(table),
    })
}

pub fn hamiltonian(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let section = &cfg.hamiltonian;
    let include_quadratic = section.include_quadratic.unwrap_or(cfg.coupling.include_quadratic);
    let tensor = match &section.uniform {
        Some(u) => {
            if include_quadratic {
                return Err(CliError::Config(
                    "hamiltonian.uniform carries no two-phonon elements; drop include_quadratic".into(),
                ));
            }
            CouplingTensor::uniform(u.g, &u.optical, &u.acoustic)?
        }
        None => coupling_tensor(cfg, include_quadratic)?.0,
    };
    let spectrum = ModeSpectrum::from_tensor(&tensor);
    let tolerance = section
        .resonance_tolerance
        .unwrap_or_else(|| spectrum.default_resonance_tolerance());
    let terms = assemble(&tensor, &spectrum, include_quadratic)?;
    let classified = classify_terms(&terms, tolerance)?;
    let violations: Vec<String> = hermitian_closure_violations(&terms)
        .iter()
        .map(|m| m.to_string())
        .collect();
    let mut table = Table::new(&[
        "signature",
        "coefficient_rad_s",
        "oscillation_rad_s",
        "process",
        "resonant",
    ]);
    let mut list = Vec::new();
    for c in &classified {
        let process = serde_json::to_value(c.term.process).unwrap_or(Value::Null);
        table.rows.push(vec![
            c.term.signature.to_string(),
            format_number(c.term.coefficient, cfg.output.precision),
            format_number(c.term.oscillation, cfg.output.precision),
            process.as_str().unwrap_or_default().to_string(),
            c.resonant.to_string(),
        ]);
        list.push(json!({
            "signature": c.term.signature.to_string(),
            "coefficient": q(c.term.coefficient, "rad/s"),
            "oscillation": q(c.term.oscillation, "rad/s"),
            "process": process,
            "resonant": c.resonant,
        }));
    }
    Ok(Rendered {
        json: json!({
            "command": "hamiltonian",
            "optical_frequencies": spectrum.optical.iter().map(|&w| q(w, "rad/s")).collect::<Vec<_>>(),
            "acoustic_frequencies": spectrum.acoustic.iter().map(|&f| q(f, "rad/s")).collect::<Vec<_>>(),
            "resonance_tolerance": q(tolerance, "rad/s"),
            "term_count": list.len(),
            "terms": list,
            "hermitian_closure_violations": violations,
        }),
        table: Some(table),
    })
}

pub fn rate_config_json(c: &RateConfig) -> Value {
    json!({
        "g": q(c.g, "rad/s"),
        "omega1": q(c.omega1, "rad/s"),
        "omega2": q(c.omega2, "rad/s"),
        "f1": q(c.f1, "rad/s"),
        "f2": q(c.f2, "rad/s"),
        "gamma": q(c.gamma, "rad/s"),
        "kappa": q(c.kappa, "rad/s"),
        "n1": q(c.n1, "1"),
        "n2": q(c.n2, "1"),
        "mu1": q(c.mu1, "1"),
        "mu2": q(c.mu2, "1"),
    })
}

fn bracket_json(b: &BracketBreakdown) -> Value {
    json!({
        "total": q(b.total, "s/rad"),
        "naive_sum": q(b.naive_sum(), "s/rad"),
        "pathways": b.pathways.iter().map(|p| json!({
            "pathway": p.pathway.label(),
            "description": p.pathway.description(),
            "denominator": q(p.denominator, "rad/s"),
            "addend": q(p.addend, "s/rad"),
        })).collect::<Vec<_>>(),
    })
}

fn rate_json(r: &RateResult) -> Value {
    json!({
        "kind": r.kind,
        "value": q(r.value, &r.unit),
        "detuning": q(r.detuning, "rad/s"),
        "one_phonon_detuning": q(r.one_phonon_detuning, "rad/s"),
        "effective_phonon_frequency": q(r.effective_phonon_frequency, "rad/s"),
        "lineshape": q(r.lineshape, "s/rad"),
        "occupation_factor": q(r.occupation_factor, "1"),
        "bracket": r.bracket.as_ref().map(bracket_json),
        "warnings": r.warnings,
    })
}

pub fn rates(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let c = cfg.rates()?;
    let r1 = one_phonon_rate(&c)?;
    let bare = two_phonon_rate(&c, Broadening::Bare)?;
    let broadened = two_phonon_rate(&c, Broadening::CavityBroadened)?;
    let mut notes = Vec::new();
    let (exact, approx) = if r1.value > 0.0 {
        (
            Some(rate_json(&rate_ratio(&c, RatioMode::Exact)?)),
            Some(rate_json(&rate_ratio(&c, RatioMode::PaperApprox)?)),
        )
    } else {
        notes.push("R1 vanishes; ratios omitted".to_string());
        (None, None)
    };
    Ok(Rendered::json(json!({
        "command": "rates",
        "config": rate_config_json(&c),
        "one_phonon": rate_json(&r1),
        "two_phonon_bare": rate_json(&bare),
        "two_phonon_broadened": rate_json(&broadened),
        "ratio_exact": exact,
        "ratio_paper_approx": approx,
        "ratio_prefactor": q(paper_ratio_prefactor(&c), "1"),
        "notes": notes,
    })))
}

pub fn sweep(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let c = cfg.rates()?;
    let s = &cfg.sweep;
    let (rows, name, unit): (Vec<SweepRow>, &str, &str) = match s.parameter {
        SweepParameter::Detuning => {
            let grid = match &s.values {
                Some(v) => v.clone(),
                None => symmetric_grid(s.half_width.unwrap_or(5.0 * c.gamma), s.points)?,
            };
            (detuning_sweep(&c, &grid)?, "detuning_rad_s", "rad/s")
        }
        SweepParameter::N1 => {
            let grid = match &s.values {
                Some(v) => v.clone(),
                None => (0..=6).map(|k| 10f64.powi(k)).collect(),
            };
            (photon_number_sweep(&c, &grid)?, "n1", "1")
        }
    };
    let digits = cfg.output.precision;
    let mut table = Table::new(&[name, "R1", "R2_bare", "R2_broadened", "ratio"]);
    let mut list = Vec::new();
    for r in &rows {
        table.rows.push(
            [r.parameter, r.r1, r.r2_bare, r.r2_broadened, r.ratio]
                .iter()
                .map(|&v| format_number(v, digits))
                .collect(),
        );
        list.push(json!({
            "parameter": q(r.parameter, unit),
            "R1": q(r.r1, "rad/s"),
            "R2_bare": q(r.r2_bare, "rad/s"),
            "R2_broadened": q(r.r2_broadened, "rad/s"),
            "ratio": if r.ratio.is_nan() { Value::Null } else { q(r.ratio, "1") },
        }));
    }
    Ok(Rendered {
        json: json!({
            "command": "sweep",
            "parameter": name,
            "config": rate_config_json(&c),
            "rows": list,
        }),
        table: Some(table),
    })
}

/// Pass flags and limits of an oracle run.
fn oracle_summary(
    first: &[FirstOrderRecord],
    scaling: &[(String, ScalingRecord)],
    second: Option<&SecondOrderRecord>,
) -> Value {
    let mut checks = Vec::new();
    for r in first {
        if r.detuning == 0.0 {
            checks.push(json!({
                "check": "first-order resonant transfer",
                "value": r.max_relative_deviation,
                "limit": FIRST_ORDER_LIMIT,
                "pass": r.max_relative_deviation <= FIRST_ORDER_LIMIT,
            }));
        } else {
            checks.push(json!({
                "check": format!("first-order envelope at detuning {}", r.detuning),
                "value": r.mean_transfer / r.envelope,
                "limit": 1.0,
                "pass": r.mean_transfer <= r.envelope && r.max_transfer <= 1.01 * r.envelope,
            }));
        }
    }
    for (label, r) in scaling {
        checks.push(json!({
            "check": format!("occupation scaling {label}"),
            "value": r.relative_deviation,
            "limit": SCALING_LIMIT,
            "pass": r.relative_deviation <= SCALING_LIMIT,
        }));
    }
    if let Some(r) = second {
        checks.push(json!({
            "check": "second-order amplitude vs |bracket|",
            "value": r.max_relative_deviation,
            "limit": SECOND_ORDER_LIMIT,
            "pass": r.max_relative_deviation <= SECOND_ORDER_LIMIT,
        }));
        checks.push(json!({
            "check": "cancellation at resonance",
            "value": r.cancellation.worst_ratio,
            "limit": CANCELLATION_LIMIT,
            "pass": r.cancellation.worst_ratio <= CANCELLATION_LIMIT,
        }));
        checks.push(json!({
            "check": "pathway ordering",
            "value": null,
            "limit": null,
            "pass": r.pathway_scans.iter().all(|p| p.ordering_matches),
        }));
    }
    Value::Array(checks)
}

pub fn oracle(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let o = &cfg.oracle;
    let settings = o.settings;
    let checks = o
        .checks
        .clone()
        .unwrap_or_else(|| vec![OracleCheck::FirstOrder, OracleCheck::Scaling, OracleCheck::SecondOrder]);
    let one = resolve_rates(o.one_phonon.as_ref(), DESK_ONE_PHONON)?;
    let two = resolve_rates(o.two_phonon.as_ref(), DESK_TWO_PHONON)?;

    let mut first = Vec::new();
    if checks.contains(&OracleCheck::FirstOrder) {
        let detunings = o
            .first_order_detunings
            .clone()
            .unwrap_or_else(|| vec![0.0, 50.0 * one.g]);
        for d in detunings {
            first.push(first_order_check(&one, d, &settings)?);
        }
    }
    let mut scaling = Vec::new();
    if checks.contains(&OracleCheck::Scaling) {
        let probes = [
            (
                "n1 + 1",
                RateConfig {
                    n1: one.n1 + 1.0,
                    ..one
                },
            ),
            (
                "mu1 + 2",
                RateConfig {
                    mu1: one.mu1 + 2.0,
                    ..one
                },
            ),
            (
                "n2 + 1",
                RateConfig {
                    n2: one.n2 + 1.0,
                    ..one
                },
            ),
        ];
        for (label, probe) in probes {
            scaling.push((label.to_string(), occupation_scaling_check(&one, &probe, &settings)?));
        }
    }
    let second = if checks.contains(&OracleCheck::SecondOrder) {
        let detunings = o.second_order_detunings.clone().unwrap_or_else(|| default_scan(two.f1));
        Some(second_order_check(&two, &detunings, &settings)?)
    } else {
        None
    };
    let summary = oracle_summary(&first, &scaling, second.as_ref());
    Ok(Rendered::json(json!({
        "command": "oracle",
        "units": "desk units with hbar = 1: frequencies and detunings in rad per unit time, times in unit time, probabilities dimensionless",
        "settings": to_value(&settings),
        "one_phonon_config": rate_config_json(&one),
        "two_phonon_config": rate_config_json(&two),
        "first_order": first.iter().map(to_value).collect::<Vec<_>>(),
        "scaling": scaling.iter().map(|(label, r)| json!({"probe": label, "record": to_value(r)})).collect::<Vec<_>>(),
        "second_order": second.as_ref().map(to_value),
        "summary": summary,
    })))
}
