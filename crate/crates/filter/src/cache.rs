//! Plain-text cache of synthesized polynomials and their phases.
//!
//! The first line is a version header. Every further line is one record:
//! `eta mu w eps_out | c_0 ... c_K | phi_0 ... phi_eta`, numbers written with
//! 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::{FilterError, QspPhases, Result, StepPolynomial};

pub const HEADER: &str = "affqetu-filter-cache v1";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseCache {
    pub records: Vec<(StepPolynomial, QspPhases)>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl PhaseCache {
    /// Record whose parameters match within `1e-12`.
    pub fn get(&self, eta: usize, mu: f64, w: f64) -> Option<&(StepPolynomial, QspPhases)> {
        self.records
            .iter()
            .find(|(p, _)| p.degree == eta && (p.cutoff - mu).abs() < 1e-12 && (p.band_halfwidth - w).abs() < 1e-12)
    }

    pub fn insert(&mut self, poly: StepPolynomial, phases: QspPhases) {
        self.records.retain(|(p, _)| {
            !(p.degree == poly.degree && p.cutoff == poly.cutoff && p.band_halfwidth == poly.band_halfwidth)
        });
        self.records.push((poly, phases));
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{HEADER}\n");
        for (p, ph) in &self.records {
            let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
            let _ = writeln!(
                s,
                "{} {} {} {} | {} | {}",
                p.degree,
                num(p.cutoff),
                num(p.band_halfwidth),
                num(p.eps_out),
                join(&p.cheb_coeffs),
                join(&ph.phases)
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(HEADER) {
            return Err(FilterError::Cache("missing or unknown version header".into()));
        }
        let bad = |line: usize, what: &str| FilterError::Cache(format!("line {}: {what}", line + 2));
        let mut records = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 3 {
                return Err(bad(i, "expected three '|'-separated fields"));
            }
            let floats = |s: &str| -> Result<Vec<f64>> {
                s.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| bad(i, "bad number"))).collect()
            };
            let head: Vec<&str> = parts[0].split_whitespace().collect();
            if head.len() != 4 {
                return Err(bad(i, "expected eta mu w eps_out"));
            }
            let degree: usize = head[0].parse().map_err(|_| bad(i, "bad degree"))?;
            let p = floats(&head[1..].join(" "))?;
            let cheb_coeffs = floats(parts[1])?;
            let phases = floats(parts[2])?;
            if cheb_coeffs.len() != degree / 2 + 1 || phases.len() != degree + 1 {
                return Err(bad(i, "length does not match degree"));
            }
            let poly = StepPolynomial { degree, cutoff: p[0], cheb_coeffs, band_halfwidth: p[1], eps_out: p[2] };
            records.push((poly, QspPhases::new(phases)?));
        }
        Ok(Self { records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FilterError::Cache(e.to_string()))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| FilterError::Cache(e.to_string()))
    }
}
