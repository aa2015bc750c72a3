//! CH-type lifting and the two-setting reduction.
//!
//! Lifting replaces every party's setting-0 outcome by the constant 1. A term
//! with settings tuple `t` then reads `⟨Π_{i: t_i ≠ 0} m_i^(t_i)⟩`: the
//! all-zero tuple is the normalization, tuples with one nonzero slot are
//! marginals and the rest are correlations among two-setting observables.

use crate::error::{BellError, Result};
use crate::polytope::{
    inequality_from_sign_function, settings_count, settings_of, vertex_tensor, BellInequality, Vertex,
};
use crate::scalar::Scalar;
use crate::sign::{assignment_count, SignFunction, VariableAssignment};
use std::collections::BTreeMap;

/// `(1, m^(1), m^(2))⊗…`, the vertex with `x = +1` and all setting-0 outcomes `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedVertex {
    pub pairs: Vec<(i8, i8)>,
    pub vertex: Vertex,
}

impl LiftedVertex {
    pub fn tensor(&self) -> &[i8] {
        self.vertex.tensor()
    }
}

/// All `2^(2N)` lifted vertices, in assignment order.
pub fn lifted_vertices(parties: usize) -> Vec<LiftedVertex> {
    VariableAssignment::all(parties)
        .map(|v| LiftedVertex {
            pairs: (0..parties).map(|i| (v.first(i), v.second(i))).collect(),
            vertex: vertex_tensor(v, 1),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedInequality {
    pub source: BellInequality,
    /// Coefficient of the normalization term.
    pub constant: i64,
    /// Per party, the coefficients of `⟨m^(1)⟩` and `⟨m^(2)⟩`.
    pub marginal_coeffs: Vec<[i64; 2]>,
    /// Nonzero coefficients of terms involving two or more parties.
    pub correlations: Vec<(Vec<u8>, i64)>,
    /// Exact extremes over the lifted vertices.
    pub bounds: (i64, i64),
    /// Assignment indices of lifted vertices attaining `bounds.0` and `bounds.1`.
    pub witnesses: (usize, usize),
    /// The lifted expression is constant on the lifted polytope.
    pub degenerate: bool,
}

pub fn lift(ineq: &BellInequality) -> LiftedInequality {
    let parties = ineq.parties;
    let mut constant = 0;
    let mut marginal_coeffs = vec![[0i64; 2]; parties];
    let mut correlations = Vec::new();
    for (k, &c) in ineq.coeffs.iter().enumerate() {
        let settings = settings_of(parties, k);
        let active: Vec<usize> = (0..parties).filter(|&i| settings[i] != 0).collect();
        match active.as_slice() {
            [] => constant = c,
            [i] => marginal_coeffs[*i][settings[*i] as usize - 1] = c,
            _ if c != 0 => correlations.push((settings, c)),
            _ => {}
        }
    }
    let values: Vec<i64> = lifted_vertices(parties).iter().map(|w| ineq.value_at(&w.vertex)).collect();
    let (mut lo, mut hi) = (0, 0);
    for (k, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = k;
        }
        if *v > values[hi] {
            hi = k;
        }
    }
    let bounds = (values[lo], values[hi]);
    LiftedInequality {
        source: ineq.clone(),
        constant,
        marginal_coeffs,
        correlations,
        bounds,
        witnesses: (lo, hi),
        degenerate: bounds.0 == bounds.1,
    }
}

impl LiftedInequality {
    /// The lifted expression on observable data `D(t) = ⟨Π_{t_i≠0} m_i^(t_i)⟩`,
    /// given as a tensor whose all-zero entry is the normalization 1.
    pub fn evaluate<T: Scalar>(&self, data: &crate::polytope::CorrelationTensor<T>) -> T {
        data.dot(&self.source.coeffs)
    }

    /// Rewrites the expression over probabilities of joint `+1` outcomes.
    ///
    /// Each event is a sorted list of `(party, setting)` pairs; the empty
    /// event is the constant term. Uses `m = 2p - 1`, so
    /// `Π_{i∈S} m_i = Σ_{U⊆S} 2^|U| (-1)^(|S|-|U|) P(+ on U)`.
    pub fn probability_form(&self) -> ProbabilityForm {
        let parties = self.source.parties;
        let mut terms: BTreeMap<Vec<(u8, u8)>, i64> = BTreeMap::new();
        for (k, &c) in self.source.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let settings = settings_of(parties, k);
            let support: Vec<(u8, u8)> = (0..parties)
                .filter(|&i| settings[i] != 0)
                .map(|i| (i as u8, settings[i]))
                .collect();
            let s = support.len();
            for mask in 0..1usize << s {
                let event: Vec<(u8, u8)> =
                    (0..s).filter(|b| mask >> b & 1 == 1).map(|b| support[b]).collect();
                let u = event.len();
                let sign = if (s - u) % 2 == 0 { 1 } else { -1 };
                *terms.entry(event).or_insert(0) += c * sign * (1i64 << u);
            }
        }
        terms.retain(|_, c| *c != 0);
        ProbabilityForm { terms, bounds: self.bounds }
    }
}

/// A lifted inequality over joint `+1` probabilities: `bounds.0 ≤ Σ c·P(event) ≤ bounds.1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityForm {
    pub terms: BTreeMap<Vec<(u8, u8)>, i64>,
    pub bounds: (i64, i64),
}

impl ProbabilityForm {
    /// Human-readable `P(A1B2)`-style labels, party letters from `A`.
    pub fn labelled_terms(&self) -> Vec<(String, i64)> {
        self.terms
            .iter()
            .map(|(event, &c)| {
                let label = if event.is_empty() {
                    "1".to_string()
                } else {
                    let body: String =
                        event.iter().map(|&(i, n)| format!("{}{}", char::from(b'A' + i), n)).collect();
                    format!("P({body})")
                };
                (label, c)
            })
            .collect()
    }
}

/// Sign functions depending on each party's first variable only, i.e. all
/// `2^(2^N)` sign functions of `N` variables, with their inequalities.
/// Their coefficient support lies in settings `{0,1}^N`.
pub fn two_setting_reduction(parties: usize) -> Result<Vec<BellInequality>> {
    if !(2..=3).contains(&parties) {
        return Err(BellError::UnsupportedSize(format!(
            "two-setting reduction for {parties} parties (supported: 2..=3)"
        )));
    }
    let count = 1usize << (1 << parties);
    (0..count)
        .map(|f| {
            let s = SignFunction::from_fn(parties, |v| {
                let firsts = (0..parties).fold(0, |acc, i| acc | (((v.first(i) == -1) as usize) << i));
                if (f >> firsts) & 1 == 0 {
                    1
                } else {
                    -1
                }
            })?;
            inequality_from_sign_function(&s)
        })
        .collect()
}

/// True iff `s` ignores every party's second variable.
pub fn depends_on_first_variables_only(s: &SignFunction) -> bool {
    let parties = s.parties();
    (0..assignment_count(parties)).all(|v| {
        (0..parties).all(|i| {
            let w = 1 << (2 * i + 1);
            s.bit(v) == s.bit(v ^ w)
        })
    })
}

/// Three-party Mermin pattern: four equal-magnitude coefficients filling one
/// parity class of `{0,1}^3`.
pub fn is_mermin_pattern(ineq: &BellInequality) -> bool {
    if ineq.parties != 3 {
        return false;
    }
    let support: Vec<usize> = (0..settings_count(3)).filter(|&k| ineq.coeffs[k] != 0).collect();
    if support.len() != 4 {
        return false;
    }
    let magnitude = ineq.coeffs[support[0]].abs();
    let tuples: Vec<Vec<u8>> = support.iter().map(|&k| settings_of(3, k)).collect();
    let binary = tuples.iter().all(|t| t.iter().all(|&n| n <= 1));
    let parity = |t: &Vec<u8>| t.iter().map(|&n| n as u32).sum::<u32>() % 2;
    binary
        && support.iter().all(|&k| ineq.coeffs[k].abs() == magnitude)
        && tuples.iter().all(|t| parity(t) == parity(&tuples[0]))
}
