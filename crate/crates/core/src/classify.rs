//! Grouping admissible sign functions into symmetry classes.

use crate::enumerate::{Enumeration, EnumerationMode};
use crate::error::{BellError, Result};
use crate::fourier::is_factorable;
use crate::polytope::{settings_count, settings_of, BellInequality};
use crate::sign::SignFunction;
use crate::symmetry::SymmetryGroup;
use serde::Serialize;
use std::collections::HashSet;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalClass {
    /// Lexicographically least table of the orbit.
    #[serde(serialize_with = "crate::catalog::serialize_sign")]
    pub representative: SignFunction,
    pub orbit_size: usize,
    /// Trivial class, `|E_t| ≤ 1` for a single settings tuple.
    pub factorable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub parties: usize,
    pub total_admissible: usize,
    pub factorable_count: usize,
    pub canonical_classes: Vec<CanonicalClass>,
    /// Seconds; excluded from serialized reports so they stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

impl EnumerationReport {
    pub fn nontrivial(&self) -> impl Iterator<Item = &CanonicalClass> {
        self.canonical_classes.iter().filter(|c| !c.factorable)
    }
}

fn check_classifiable(parties: usize) -> Result<()> {
    if parties > 3 {
        return Err(BellError::UnsupportedSize(format!("classification for {parties} parties")));
    }
    Ok(())
}

/// Enumerates, canonicalizes and annotates all admissible functions.
pub fn classify(parties: usize, workers: usize) -> Result<EnumerationReport> {
    classify_enumeration(&Enumeration::new(parties, EnumerationMode::Backtracking)?.workers(workers))
}

/// As [`classify`], driving a configured enumeration (checkpointing, resume).
pub fn classify_enumeration(enumeration: &Enumeration) -> Result<EnumerationReport> {
    check_classifiable(enumeration.parties())?;
    let started = Instant::now();
    let all = enumeration.collect()?;
    let mut report = classify_tables(enumeration.parties(), &all)?;
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(report)
}

/// Groups the complete sorted list of admissible functions into classes.
///
/// Classes are found by sweeping the sorted stream: the first unseen table is
/// the least element of its orbit, and its whole orbit is then marked seen.
pub fn classify_tables(parties: usize, all: &[SignFunction]) -> Result<EnumerationReport> {
    check_classifiable(parties)?;
    let started = Instant::now();
    let group = SymmetryGroup::new(parties)?;
    let mut seen: HashSet<SignFunction> = HashSet::with_capacity(all.len());
    let mut classes = Vec::new();
    let mut factorable_count = 0;
    for s in all {
        let factorable = is_factorable(s);
        factorable_count += factorable as usize;
        if seen.contains(s) {
            continue;
        }
        let orbit = group.orbit(s);
        debug_assert_eq!(orbit[0], *s);
        classes.push(CanonicalClass { representative: *s, orbit_size: orbit.len(), factorable });
        seen.extend(orbit);
    }
    Ok(EnumerationReport {
        parties,
        total_admissible: all.len(),
        factorable_count,
        canonical_classes: classes,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Four coefficients of magnitude 8 on a 2×2 settings block, with an odd
/// number of negative signs.
pub fn is_chsh_pattern(ineq: &BellInequality) -> bool {
    if ineq.parties != 2 {
        return false;
    }
    let support = ineq.support();
    if support.len() != 4 {
        return false;
    }
    let rows: HashSet<u8> = support.iter().map(|t| t[0]).collect();
    let cols: HashSet<u8> = support.iter().map(|t| t[1]).collect();
    let negatives = ineq.coeffs.iter().filter(|&&c| c < 0).count();
    rows.len() == 2
        && cols.len() == 2
        && ineq.coeffs.iter().all(|&c| c == 0 || c.abs() == 8)
        && negatives % 2 == 1
}

/// True iff some party's coefficient support uses all three of its settings.
pub fn uses_three_settings(ineq: &BellInequality) -> bool {
    (0..ineq.parties).any(|i| {
        let used: HashSet<u8> = (0..settings_count(ineq.parties))
            .filter(|&k| ineq.coeffs[k] != 0)
            .map(|k| settings_of(ineq.parties, k)[i])
            .collect();
        used.len() == 3
    })
}
