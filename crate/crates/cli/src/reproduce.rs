//! Published-number reproduction table.

use std::f64::consts::PI;

use heliomech_core::coupling::{linear_coupling_element, linear_coupling_uniform_estimate, quadratic_suppression};
use heliomech_core::rates::{bracket_from_gap, paper_ratio_prefactor, rate_ratio};
use heliomech_core::{MaterialCoefficients, RatioMode};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{format_number, q, round_sig, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Factor(f64),
    Decades(f64),
    Absolute(f64),
}

impl Tolerance {
    fn accepts(&self, reference: f64, computed: f64) -> bool {
        match *self {
            Tolerance::Relative(r) => ((computed - reference) / reference).abs() <= r,
            Tolerance::Factor(k) => computed > 0.0 && (computed / reference).max(reference / computed) <= k,
            Tolerance::Decades(d) => computed > 0.0 && (computed.log10() - reference.log10()).abs() <= d,
            Tolerance::Absolute(a) => (computed - reference).abs() <= a,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Tolerance::Relative(r) if r >= 1e-3 => format!("{}% rel", round_sig(r * 100.0, 3)),
            Tolerance::Relative(r) => format!("{r:e} rel"),
            Tolerance::Factor(k) => format!("factor {k}"),
            Tolerance::Decades(d) => format!("{d} decade"),
            Tolerance::Absolute(a) => format!("abs {a:e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: &'static str,
    pub unit: &'static str,
    /// Value the check compares against.
    pub reference: f64,
    pub computed: f64,
    pub tolerance: Tolerance,
    pub note: String,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.tolerance.accepts(self.reference, self.computed)
    }
}

/// Two-phonon resonance with whole-number SI frequencies: ω₁ + f₁ + f₂ − ω₁
/// is then exact in floating point.
const RESONANCE_OMEGA1: f64 = 1_883_651_567_308_853.0;
const RESONANCE_F: f64 = 62_831_853.0;

pub fn rows(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let fluid = cfg.fluid()?;
    let mat = MaterialCoefficients::new(&fluid)?;
    let cav = cfg.cavity()?;
    let (w, f, v) = (cav.optical_frequency(), cav.phonon_frequency, cav.volume);
    let closed = linear_coupling_uniform_estimate(&mat, w, f, v)?;
    let opt = cav.optical_modes()?;
    let ac = cav.acoustic_modes()?;
    let quadrature = linear_coupling_element(&mat, &opt[0], &opt[0], &ac[0])?;
    let suppression = quadratic_suppression(&mat, f, v)?;
    let gap = (RESONANCE_OMEGA1 + 2.0 * RESONANCE_F) - RESONANCE_OMEGA1;
    let bracket = bracket_from_gap(gap, RESONANCE_F, RESONANCE_F)?.total;
    let rates = cfg.rates()?;
    let prefactor = paper_ratio_prefactor(&rates);
    let approx = rate_ratio(&rates, RatioMode::PaperApprox)?.value;
    let printed_chain = 2e-16 * rates.n1 * rates.n1 * rates.mu2;
    let two_pi = 2.0 * PI;
    Ok(vec![
        Row {
            name: "g1",
            unit: "1",
            reference: 0.05826,
            computed: mat.g1,
            tolerance: Tolerance::Relative(5e-3),
            note: String::new(),
        },
        Row {
            name: "g2",
            unit: "1",
            reference: 0.00111,
            computed: mat.g2,
            tolerance: Tolerance::Relative(1e-2),
            note: String::new(),
        },
        Row {
            name: "eps/eps0",
            unit: "1",
            reference: 1.057,
            computed: mat.eps_ratio0,
            tolerance: Tolerance::Relative(1e-3),
            note: String::new(),
        },
        Row {
            name: "g'/g1 / 2pi",
            unit: "Hz",
            reference: 30e3,
            computed: closed / mat.g1 / two_pi,
            tolerance: Tolerance::Relative(0.05),
            note: String::new(),
        },
        Row {
            name: "g' / 2pi",
            unit: "Hz",
            reference: 1.8e3,
            computed: closed / two_pi,
            tolerance: Tolerance::Relative(0.05),
            note: String::new(),
        },
        Row {
            name: "g' quadrature / closed form",
            unit: "1",
            reference: 1.0,
            computed: quadrature / closed,
            tolerance: Tolerance::Relative(1e-10),
            note: "consistency".into(),
        },
        Row {
            name: "p/g'",
            unit: "1",
            reference: 5e-12,
            computed: suppression,
            tolerance: Tolerance::Factor(3.0),
            note: String::new(),
        },
        Row {
            name: "|bracket| x f at resonance",
            unit: "1",
            reference: 0.0,
            computed: bracket.abs() * RESONANCE_F,
            tolerance: Tolerance::Absolute(1e-14),
            note: "f1 = f2 = 62831853 rad/s".into(),
        },
        Row {
            name: "R2/R1 prefactor g^2 kappa^2/2f^4",
            unit: "1",
            reference: 2e-14,
            computed: prefactor,
            tolerance: Tolerance::Relative(1e-9),
            note: "printed as 2e-16".into(),
        },
        Row {
            name: "R2/R1 with formula prefactor",
            unit: "1",
            reference: 2e-14 * rates.n1 * rates.n1 * rates.mu2,
            computed: approx,
            tolerance: Tolerance::Relative(1e-9),
            note: "2e-14 n1^2 mu2".into(),
        },
        Row {
            name: "R2/R1 with printed prefactor",
            unit: "1",
            reference: 1e-3,
            computed: printed_chain,
            tolerance: Tolerance::Decades(0.5),
            note: "2e-16 n1^2 mu2".into(),
        },
    ])
}

pub fn table(rows: &[Row], digits: usize) -> Table {
    let mut t = Table::new(&["check", "unit", "reference", "computed", "tolerance", "status", "note"]);
    for r in rows {
        t.rows.push(vec![
            r.name.into(),
            r.unit.into(),
            format_number(r.reference, digits),
            format_number(r.computed, digits),
            r.tolerance.describe(),
            if r.pass() { "PASS" } else { "FAIL" }.into(),
            r.note.clone(),
        ]);
    }
    t
}

pub fn json(rows: &[Row]) -> Value {
    json!({
        "command": "reproduce",
        "all_pass": rows.iter().all(Row::pass),
        "checks": rows.iter().map(|r| json!({
            "check": r.name,
            "reference": q(r.reference, r.unit),
            "computed": q(r.computed, r.unit),
            "tolerance": r.tolerance.describe(),
            "pass": r.pass(),
            "note": r.note,
        })).collect::<Vec<_>>(),
    })
}

/// Fixed-width text rendering of the table.
pub fn text(t: &Table) -> String {
    let widths: Vec<usize> = (0..t.header.len())
        .map(|c| {
            t.rows
                .iter()
                .map(|r| r[c].chars().count())
                .chain([t.header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&t.header);
    out.push('\n');
    for r in &t.rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}
