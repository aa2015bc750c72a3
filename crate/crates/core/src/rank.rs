//! Exact rank by fraction-free (Bareiss) elimination.

use crate::scalar::ExactInteger;
use num_bigint::BigInt;

/// Rank of an integer matrix given as rows, computed in the ring `T`.
///
/// Returns `None` if an intermediate value does not fit in `T`. Every
/// intermediate is a minor of the input, so for `±1` entries `i128` is exact
/// up to 27 columns by Hadamard's bound.
pub fn bareiss_rank<T: ExactInteger>(rows: &[Vec<i64>]) -> Option<usize> {
    let mut m: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| from_i64::<T>(x)).collect::<Option<Vec<T>>>())
        .collect::<Option<_>>()?;
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = T::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            for c in col + 1..ncols {
                // row[c] = (p·row[c] − row[col]·prow[c]) / prev, exact
                let a = prow[col].checked_mul(&row[c])?;
                let b = row[col].checked_mul(&prow[c])?;
                row[c] = a.checked_sub(&b)?.checked_div(&prev)?;
            }
            row[col] = T::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    Some(rank)
}

fn from_i64<T: ExactInteger>(x: i64) -> Option<T> {
    // build through i8 limbs so that `From<i8>` is the only conversion required
    let neg = x < 0;
    let mut mag = x.unsigned_abs();
    let base = T::from(64i8);
    let mut acc = T::zero();
    let mut scale = T::one();
    while mag > 0 {
        let digit = T::from((mag % 64) as i8);
        acc = acc + digit.checked_mul(&scale)?;
        mag /= 64;
        if mag > 0 {
            scale = scale.checked_mul(&base)?;
        }
    }
    Some(if neg { T::zero() - acc } else { acc })
}

/// Exact rank, trying `i128` first and falling back to arbitrary precision.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    bareiss_rank::<i128>(rows)
        .unwrap_or_else(|| bareiss_rank::<BigInt>(rows).expect("BigInt arithmetic cannot overflow"))
}
