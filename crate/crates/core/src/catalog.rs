//! Inequality catalogs: the JSON/CSV file formats and the batch pipelines
//! producing and checking them.

use crate::classify::{classify, EnumerationReport};
use crate::error::{BellError, Result};
use crate::lifting::{lift, two_setting_reduction};
use crate::polytope::{
    inequality_from_sign_function, lhv_bounds, lhv_bounds_by_strategies, settings_count, settings_label,
    settings_of, BellInequality,
};
use crate::quantum::{seesaw_maximize, QuantumValueReport, SeesawOptions};
use crate::sign::SignFunction;
use crate::symmetry::SymmetryGroup;
use crate::tightness::certify_tightness;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub(crate) fn serialize_sign<S: Serializer>(s: &SignFunction, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub parties: usize,
    pub bound: i64,
    /// Row-major over settings tuples.
    pub coeffs: Vec<i64>,
    /// Hex of the packed generating table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_function: Option<String>,
    pub canonical: bool,
    pub tight: bool,
    pub saturating_count: usize,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifted: Option<LiftedRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumRecord {
    /// Best value found by the see-saw, a lower bound on the quantum maximum.
    pub max: f64,
    pub ratio: f64,
    /// `[party][setting] = [x, y, z]`.
    pub directions: Vec<Vec<[f64; 3]>>,
    pub state_re: Vec<f64>,
    pub state_im: Vec<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub converged: bool,
    pub monotone: bool,
}

impl From<&QuantumValueReport<f64>> for QuantumRecord {
    fn from(r: &QuantumValueReport<f64>) -> Self {
        Self {
            max: r.quantum_max,
            ratio: r.violation_ratio,
            directions: r
                .directions
                .as_slice()
                .iter()
                .map(|p| p.iter().map(|d| [d.x, d.y, d.z]).collect())
                .collect(),
            state_re: r.state.iter().map(|c| c.re).collect(),
            state_im: r.state.iter().map(|c| c.im).collect(),
            seed: r.seed,
            restarts: r.restarts,
            converged: r.converged,
            monotone: r.monotone,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTerm {
    pub settings: Vec<u8>,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTerm {
    pub event: String,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedRecord {
    pub constant: i64,
    pub marginal_coeffs: Vec<[i64; 2]>,
    pub correlations: Vec<CorrelationTerm>,
    pub bounds: [i64; 2],
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability_form: Option<Vec<ProbabilityTerm>>,
}

impl CatalogEntry {
    /// Certifies `ineq` and records the result.
    pub fn from_inequality(id: String, ineq: &BellInequality, canonical: bool) -> Result<Self> {
        let cert = certify_tightness(ineq)?;
        Ok(Self {
            id,
            parties: ineq.parties,
            bound: ineq.bound,
            coeffs: ineq.coeffs.clone(),
            sign_function: ineq.provenance.map(|s| s.to_hex()),
            canonical,
            tight: cert.tight,
            saturating_count: cert.saturating_count,
            rank: cert.rank,
            quantum: None,
            lifted: None,
        })
    }

    pub fn inequality(&self) -> Result<BellInequality> {
        let mut ineq = BellInequality::new(self.parties, self.coeffs.clone(), self.bound)?;
        ineq.provenance = self.sign().transpose()?;
        Ok(ineq)
    }

    pub fn sign(&self) -> Option<Result<SignFunction>> {
        self.sign_function.as_deref().map(|h| SignFunction::from_hex(self.parties, h))
    }
}

fn entry_id(parties: usize, k: usize) -> String {
    format!("N{parties}-{k:04}")
}

/// One certified entry per symmetry class of admissible sign functions.
pub fn enumerate_catalog(parties: usize, workers: usize) -> Result<Vec<CatalogEntry>> {
    catalog_from_report(&classify(parties, workers)?)
}

/// One certified entry per class of `report`.
pub fn catalog_from_report(report: &EnumerationReport) -> Result<Vec<CatalogEntry>> {
    let parties = report.parties;
    report
        .canonical_classes
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let ineq = inequality_from_sign_function(&c.representative)?;
            CatalogEntry::from_inequality(entry_id(parties, k), &ineq, true)
        })
        .collect()
}

/// Certified entries for every two-setting sign function.
pub fn reduce_catalog(parties: usize) -> Result<Vec<CatalogEntry>> {
    let group = SymmetryGroup::new(parties)?;
    two_setting_reduction(parties)?
        .iter()
        .enumerate()
        .map(|(k, ineq)| {
            let s = ineq.provenance.expect("reduced inequalities carry their sign function");
            CatalogEntry::from_inequality(entry_id(parties, k), ineq, group.canonicalize(&s) == s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub id: String,
    pub lhv_min: i64,
    pub lhv_max: i64,
    /// Maximum over deterministic strategies, an independent route to `lhv_max`.
    pub strategy_max: i64,
    /// `lhv_max = bound` and `lhv_min = -bound`.
    pub bound_ok: bool,
    /// The stored coefficients equal the spectrum of the stored sign function.
    pub sign_function_ok: bool,
    pub tight: bool,
    pub saturating_count: usize,
    pub rank: usize,
    /// The fresh certificate equals the one recorded in the catalog.
    pub matches_recorded: bool,
    pub pass: bool,
}

pub fn verify_entry(entry: &CatalogEntry) -> Result<VerificationRecord> {
    let ineq = entry.inequality()?;
    let bounds = lhv_bounds(&ineq);
    let strategy_max = lhv_bounds_by_strategies(&ineq).max;
    let bound_ok = bounds.max == ineq.bound && bounds.min == -ineq.bound && strategy_max == bounds.max;
    let sign_function_ok = match ineq.provenance {
        Some(s) => inequality_from_sign_function(&s).is_ok_and(|i| i.coeffs == ineq.coeffs),
        None => true,
    };
    let (tight, saturating_count, rank) = match certify_tightness(&ineq) {
        Ok(c) => (c.tight, c.saturating_count, c.rank),
        Err(BellError::BoundNotAttained { .. }) => (false, 0, 0),
        Err(e) => return Err(e),
    };
    let matches_recorded =
        tight == entry.tight && saturating_count == entry.saturating_count && rank == entry.rank;
    Ok(VerificationRecord {
        id: entry.id.clone(),
        lhv_min: bounds.min,
        lhv_max: bounds.max,
        strategy_max,
        bound_ok,
        sign_function_ok,
        tight,
        saturating_count,
        rank,
        matches_recorded,
        pass: bound_ok && sign_function_ok && tight && matches_recorded,
    })
}

pub fn verify_catalog(entries: &[CatalogEntry]) -> Result<Vec<VerificationRecord>> {
    entries.iter().map(verify_entry).collect()
}

/// Runs the see-saw on every entry and stores the result under `quantum`.
pub fn attach_quantum(entries: &mut [CatalogEntry], opts: &SeesawOptions) -> Result<()> {
    for entry in entries.iter_mut() {
        let report = seesaw_maximize::<f64>(&entry.inequality()?, opts)?;
        entry.quantum = Some(QuantumRecord::from(&report));
    }
    Ok(())
}

/// Lifts every entry and stores the result under `lifted`.
pub fn attach_lift(entries: &mut [CatalogEntry], with_probability_form: bool) -> Result<()> {
    for entry in entries.iter_mut() {
        let lifted = lift(&entry.inequality()?);
        let probability_form = with_probability_form.then(|| {
            lifted
                .probability_form()
                .labelled_terms()
                .into_iter()
                .map(|(event, coeff)| ProbabilityTerm { event, coeff })
                .collect()
        });
        entry.lifted = Some(LiftedRecord {
            constant: lifted.constant,
            marginal_coeffs: lifted.marginal_coeffs.clone(),
            correlations: lifted
                .correlations
                .iter()
                .map(|(settings, coeff)| CorrelationTerm { settings: settings.clone(), coeff: *coeff })
                .collect(),
            bounds: [lifted.bounds.0, lifted.bounds.1],
            degenerate: lifted.degenerate,
            probability_form,
        });
    }
    Ok(())
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| BellError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn catalog_from_json(text: &str) -> Result<Vec<CatalogEntry>> {
    let entries: Vec<CatalogEntry> =
        serde_json::from_str(text).map_err(|e| BellError::Parse(format!("catalog: {e}")))?;
    for e in &entries {
        if e.coeffs.len() != settings_count(e.parties) {
            return Err(BellError::Parse(format!("entry {} has {} coefficients", e.id, e.coeffs.len())));
        }
    }
    Ok(entries)
}

pub fn read_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    catalog_from_json(&fs::read_to_string(path)?)
}

/// Flattened catalog, one row per entry, coefficient columns `E_00`, `E_01`, ….
pub fn catalog_to_csv(entries: &[CatalogEntry]) -> String {
    let parties = entries.first().map_or(2, |e| e.parties);
    let mut out = String::from("id,parties,bound,sign_function,canonical,tight,saturating_count,rank");
    for k in 0..settings_count(parties) {
        out.push(',');
        out.push_str(&settings_label(&settings_of(parties, k)));
    }
    out.push_str(",quantum_max,quantum_ratio,lifted_min,lifted_max,lifted_degenerate\n");
    for e in entries {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.id,
            e.parties,
            e.bound,
            e.sign_function.as_deref().unwrap_or(""),
            e.canonical,
            e.tight,
            e.saturating_count,
            e.rank
        );
        for c in &e.coeffs {
            let _ = write!(out, ",{c}");
        }
        match &e.quantum {
            Some(q) => {
                let _ = write!(out, ",{},{}", q.max, q.ratio);
            }
            None => out.push_str(",,"),
        }
        match &e.lifted {
            Some(l) => {
                let _ = write!(out, ",{},{},{}", l.bounds[0], l.bounds[1], l.degenerate);
            }
            None => out.push_str(",,,"),
        }
        out.push('\n');
    }
    out
}

pub fn verification_to_csv(records: &[VerificationRecord]) -> String {
    let mut out = String::from(
        "id,lhv_min,lhv_max,strategy_max,bound_ok,sign_function_ok,tight,saturating_count,rank,matches_recorded,pass\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.id,
            r.lhv_min,
            r.lhv_max,
            r.strategy_max,
            r.bound_ok,
            r.sign_function_ok,
            r.tight,
            r.saturating_count,
            r.rank,
            r.matches_recorded,
            r.pass
        );
    }
    out
}
