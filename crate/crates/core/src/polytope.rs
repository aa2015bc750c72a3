//! The local-realistic correlation polytope: vertices, deterministic
//! strategies, correlation tensors and Bell inequalities.
//!
//! Tensors over settings tuples `(n_1, …, n_N) ∈ {0,1,2}^N` are flattened row
//! major, party 1 most significant.

use crate::error::{BellError, Result};
use crate::fourier::{fourier_transform, Monomial};
use crate::scalar::Scalar;
use crate::sign::{assignment_count, check_parties, SignFunction, VariableAssignment};

/// `3^N`, the dimension of the correlation space.
pub fn settings_count(parties: usize) -> usize {
    3usize.pow(parties as u32)
}

/// Settings tuple of a flat index.
pub fn settings_of(parties: usize, mut index: usize) -> Vec<u8> {
    let mut out = vec![0u8; parties];
    for slot in out.iter_mut().rev() {
        *slot = (index % 3) as u8;
        index /= 3;
    }
    out
}

pub fn index_of(settings: &[u8]) -> usize {
    settings.iter().fold(0, |acc, &n| acc * 3 + n as usize)
}

/// Label such as `E_012` for a settings tuple.
pub fn settings_label(settings: &[u8]) -> String {
    let digits: String = settings.iter().map(|n| char::from(b'0' + n)).collect();
    format!("E_{digits}")
}

/// `x·(1,u_1,w_1)⊗…⊗(1,u_N,w_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub assignment: VariableAssignment,
    pub sign: i8,
    tensor: Vec<i8>,
}

impl Vertex {
    pub fn tensor(&self) -> &[i8] {
        &self.tensor
    }

    pub fn parties(&self) -> usize {
        self.assignment.parties()
    }
}

pub fn vertex_tensor(assignment: VariableAssignment, sign: i8) -> Vertex {
    let parties = assignment.parties();
    let factors: Vec<[i8; 3]> =
        (0..parties).map(|i| [1, assignment.first(i), assignment.second(i)]).collect();
    let tensor = (0..settings_count(parties))
        .map(|k| {
            settings_of(parties, k)
                .iter()
                .zip(&factors)
                .fold(sign, |acc, (&n, f)| acc * f[n as usize])
        })
        .collect();
    Vertex { assignment, sign, tensor }
}

/// All `2^(2N+1)` vertices, ordered by assignment then sign `+1, -1`.
pub fn all_vertices(parties: usize) -> Vec<Vertex> {
    VariableAssignment::all(parties)
        .flat_map(|v| [vertex_tensor(v, 1), vertex_tensor(v, -1)])
        .collect()
}

/// The overcomplete basis `{ V_{v, s(v)} }` selected by a sign function.
pub fn signed_basis(s: &SignFunction) -> Vec<Vertex> {
    VariableAssignment::all(s.parties()).map(|v| vertex_tensor(v, s.eval(v))).collect()
}

/// Predetermined outcomes `(m^(0), m^(1), m^(2))` of every party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub outcomes: Vec<[i8; 3]>,
}

impl DeterministicStrategy {
    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    /// All `2^(3N)` strategies.
    pub fn all(parties: usize) -> impl Iterator<Item = DeterministicStrategy> {
        (0..1usize << (3 * parties)).map(move |code| DeterministicStrategy {
            outcomes: (0..parties)
                .map(|i| {
                    let m = |k: usize| if (code >> (3 * i + k)) & 1 == 0 { 1 } else { -1 };
                    [m(0), m(1), m(2)]
                })
                .collect(),
        })
    }

    /// Change of variables: `x = Π m^(0)`, `u_i = m_i^(0) m_i^(1)`, `w_i = m_i^(0) m_i^(2)`.
    pub fn to_vertex(&self) -> Vertex {
        let x = self.outcomes.iter().map(|m| m[0]).product();
        let values: Vec<i8> =
            self.outcomes.iter().flat_map(|m| [m[0] * m[1], m[0] * m[2]]).collect();
        let v = VariableAssignment::from_values(&values).expect("strategy has a supported size");
        vertex_tensor(v, x)
    }

    /// Integer correlations `E(n) = Π_i m_i^(n_i)`.
    pub fn correlations(&self) -> Vec<i8> {
        let parties = self.parties();
        (0..settings_count(parties))
            .map(|k| {
                settings_of(parties, k)
                    .iter()
                    .zip(&self.outcomes)
                    .map(|(&n, m)| m[n as usize])
                    .product()
            })
            .collect()
    }
}

pub fn strategy_to_correlations<T: Scalar>(d: &DeterministicStrategy) -> CorrelationTensor<T> {
    CorrelationTensor {
        parties: d.parties(),
        entries: d.correlations().into_iter().map(|e| T::from_i8(e).unwrap()).collect(),
    }
}

/// Correlation function values indexed by settings tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor<T> {
    parties: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CorrelationTensor<T> {
    pub fn new(parties: usize, entries: Vec<T>) -> Result<Self> {
        check_parties(parties)?;
        if entries.len() != settings_count(parties) {
            return Err(BellError::Parse(format!(
                "expected {} correlation values, got {}",
                settings_count(parties),
                entries.len()
            )));
        }
        let one = T::one();
        if let Some(bad) = entries.iter().find(|e| **e > one || **e < -one.clone()) {
            return Err(BellError::Parse(format!("correlation value {bad:?} outside [-1, 1]")));
        }
        Ok(Self { parties, entries })
    }

    pub fn zeros(parties: usize) -> Self {
        Self { parties, entries: vec![T::zero(); settings_count(parties)] }
    }

    pub fn from_vertex(v: &Vertex) -> Self {
        Self {
            parties: v.parties(),
            entries: v.tensor().iter().map(|&e| T::from_i8(e).unwrap()).collect(),
        }
    }

    /// `Σ_k weight_k · V_k`. Weights are not checked for convexity.
    pub fn mixture(parties: usize, terms: &[(T, &Vertex)]) -> Self {
        let mut out = Self::zeros(parties);
        for (w, v) in terms {
            for (e, &t) in out.entries.iter_mut().zip(v.tensor()) {
                *e = e.clone() + w.clone() * T::from_i8(t).unwrap();
            }
        }
        out
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, settings: &[u8]) -> &T {
        &self.entries[index_of(settings)]
    }

    pub fn neg(&self) -> Self {
        Self { parties: self.parties, entries: self.entries.iter().map(|e| -e.clone()).collect() }
    }

    /// `⟨coeffs, E⟩`.
    pub fn dot(&self, coeffs: &[i64]) -> T {
        self.entries
            .iter()
            .zip(coeffs)
            .fold(T::zero(), |acc, (e, &c)| acc + e.clone() * T::from_i64(c).unwrap())
    }
}

/// `|Σ coeffs·E| ≤ bound`, with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellInequality {
    pub parties: usize,
    pub coeffs: Vec<i64>,
    pub bound: i64,
    /// The sign function the inequality was generated from, if any.
    pub provenance: Option<SignFunction>,
}

impl BellInequality {
    pub fn new(parties: usize, coeffs: Vec<i64>, bound: i64) -> Result<Self> {
        check_parties(parties)?;
        if coeffs.len() != settings_count(parties) {
            return Err(BellError::Parse(format!(
                "expected {} coefficients, got {}",
                settings_count(parties),
                coeffs.len()
            )));
        }
        Ok(Self { parties, coeffs, bound, provenance: None })
    }

    pub fn coeff(&self, settings: &[u8]) -> i64 {
        self.coeffs[index_of(settings)]
    }

    /// `⟨coeffs, V⟩`.
    pub fn value_at(&self, v: &Vertex) -> i64 {
        self.coeffs.iter().zip(v.tensor()).map(|(&c, &t)| c * t as i64).sum()
    }

    pub fn value_at_strategy(&self, d: &DeterministicStrategy) -> i64 {
        self.coeffs.iter().zip(d.correlations()).map(|(&c, t)| c * t as i64).sum()
    }

    /// `Σ |coeffs|`, the algebraic maximum.
    pub fn algebraic_max(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Settings tuples with a nonzero coefficient.
    pub fn support(&self) -> Vec<Vec<u8>> {
        (0..self.coeffs.len())
            .filter(|&k| self.coeffs[k] != 0)
            .map(|k| settings_of(self.parties, k))
            .collect()
    }
}

/// Restricts the spectrum of an admissible sign function to its `3^N`
/// admissible monomials. The bound is `2^(2N)`.
pub fn inequality_from_sign_function(s: &SignFunction) -> Result<BellInequality> {
    let spectrum = fourier_transform(s);
    if let Some((t, c)) = spectrum.forbidden_component() {
        return Err(BellError::NotAdmissible { monomial: t.mask(), coefficient: c as i64 });
    }
    let parties = s.parties();
    let coeffs = (0..settings_count(parties))
        .map(|k| spectrum.coeff(Monomial::from_settings(&settings_of(parties, k))) as i64)
        .collect();
    Ok(BellInequality {
        parties,
        coeffs,
        bound: assignment_count(parties) as i64,
        provenance: Some(*s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhvBounds {
    pub min: i64,
    pub max: i64,
}

/// Extremes of the Bell expression over all vertices of the polytope.
pub fn lhv_bounds(ineq: &BellInequality) -> LhvBounds {
    bounds_of(all_vertices(ineq.parties).iter().map(|v| ineq.value_at(v)))
}

/// The same extremes, reached through all deterministic strategies.
pub fn lhv_bounds_by_strategies(ineq: &BellInequality) -> LhvBounds {
    bounds_of(DeterministicStrategy::all(ineq.parties).map(|d| ineq.value_at_strategy(&d)))
}

pub fn lhv_max(ineq: &BellInequality) -> i64 {
    lhv_bounds(ineq).max
}

fn bounds_of(values: impl Iterator<Item = i64>) -> LhvBounds {
    values.fold(LhvBounds { min: i64::MAX, max: i64::MIN }, |b, x| LhvBounds {
        min: b.min.min(x),
        max: b.max.max(x),
    })
}

/// `q(v, s) = 2^(-2N) ⟨V_{v, s(v)}, E⟩`.
pub fn canonical_coefficient<T: Scalar>(
    e: &CorrelationTensor<T>,
    s: &SignFunction,
    assignment: VariableAssignment,
) -> T {
    let v = vertex_tensor(assignment, s.eval(assignment));
    let dot = e
        .entries()
        .iter()
        .zip(v.tensor())
        .fold(T::zero(), |acc, (x, &t)| acc + x.clone() * T::from_i8(t).unwrap());
    dot / T::from_usize(assignment_count(s.parties())).unwrap()
}

/// `Σ_v q(v, s)`.
pub fn canonical_sum<T: Scalar>(e: &CorrelationTensor<T>, s: &SignFunction) -> T {
    VariableAssignment::all(s.parties())
        .fold(T::zero(), |acc, v| acc + canonical_coefficient(e, s, v))
}
