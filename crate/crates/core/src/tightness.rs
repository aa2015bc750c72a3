//! Facet certificates: the vertices saturating an inequality and their exact rank.

use crate::error::{BellError, Result};
use crate::polytope::{all_vertices, settings_count, BellInequality};
use crate::rank::exact_rank;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessCertificate {
    /// Vertices attaining `⟨coeffs, V⟩ = bound`.
    pub saturating_count: usize,
    /// Exact linear rank of the saturating vertex tensors.
    pub rank: usize,
    /// `3^N`; the inequality is a facet iff `rank == dimension`.
    pub dimension: usize,
    pub tight: bool,
}

/// Collects the vertices attaining the bound and certifies a facet when they
/// span the whole correlation space. The saturating hyperplane misses the
/// origin, so full linear rank means affine dimension `3^N - 1`.
pub fn certify_tightness(ineq: &BellInequality) -> Result<TightnessCertificate> {
    let rows: Vec<Vec<i64>> = all_vertices(ineq.parties)
        .into_iter()
        .filter(|v| ineq.value_at(v) == ineq.bound)
        .map(|v| v.tensor().iter().map(|&t| t as i64).collect())
        .collect();
    if rows.is_empty() {
        return Err(BellError::BoundNotAttained { bound: ineq.bound });
    }
    let dimension = settings_count(ineq.parties);
    let rank = exact_rank(&rows);
    Ok(TightnessCertificate { saturating_count: rows.len(), rank, dimension, tight: rank == dimension })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::inequality_from_sign_function;
    use crate::sign::SignFunction;

    fn chsh_on(block_a: (usize, usize), block_c: (usize, usize)) -> BellInequality {
        let mut coeffs = vec![0; 9];
        coeffs[block_a.0 * 3 + block_c.0] = 8;
        coeffs[block_a.0 * 3 + block_c.1] = 8;
        coeffs[block_a.1 * 3 + block_c.0] = 8;
        coeffs[block_a.1 * 3 + block_c.1] = -8;
        BellInequality::new(2, coeffs, 16).unwrap()
    }

    #[test]
    fn chsh_is_a_facet() {
        let s = SignFunction::from_fn(2, |v| if v.first(0) == -1 && v.first(1) == -1 { -1 } else { 1 })
            .unwrap();
        let cert = certify_tightness(&inequality_from_sign_function(&s).unwrap()).unwrap();
        assert_eq!(cert, TightnessCertificate { saturating_count: 16, rank: 9, dimension: 9, tight: true });
    }

    #[test]
    fn trivial_is_a_facet() {
        let ineq = inequality_from_sign_function(&SignFunction::constant(2, 1).unwrap()).unwrap();
        let cert = certify_tightness(&ineq).unwrap();
        assert_eq!((cert.saturating_count, cert.rank, cert.tight), (16, 9, true));
    }

    #[test]
    fn sum_of_two_facets_is_not() {
        let a = chsh_on((0, 1), (0, 1));
        let b = chsh_on((1, 2), (1, 2));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        let sum = BellInequality::new(2, coeffs, 32).unwrap();
        let cert = certify_tightness(&sum).unwrap();
        assert!(cert.rank < 9);
        assert!(!cert.tight);
    }

    #[test]
    fn unattained_bound() {
        let ineq = BellInequality::new(2, chsh_on((0, 1), (0, 1)).coeffs, 17).unwrap();
        assert_eq!(certify_tightness(&ineq), Err(BellError::BoundNotAttained { bound: 17 }));
    }
}
