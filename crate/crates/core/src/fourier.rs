//! Exact Walsh–Hadamard spectra of sign functions and the admissibility test.
//!
//! Spectra are unnormalized: `ĝ(T) = Σ_v s(v)·χ_T(v)`, so every coefficient is an
//! integer and the normalized Fourier coefficient is `ĝ(T) / 2^(2N)`.

use crate::error::{BellError, Result};
use crate::sign::{assignment_count, check_parties, SignFunction};

/// A character monomial, the set of variables multiplied together, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub u8);

impl Monomial {
    pub const EMPTY: Monomial = Monomial(0);

    pub fn mask(self) -> usize {
        self.0 as usize
    }

    /// True iff some party contributes both of its variables.
    pub fn is_local_product(self, parties: usize) -> bool {
        (0..parties).any(|i| (self.0 >> (2 * i)) & 0b11 == 0b11)
    }

    /// Settings tuple of an admissible monomial: variable absent → 0, first → 1, second → 2.
    pub fn to_settings(self, parties: usize) -> Option<Vec<u8>> {
        (0..parties)
            .map(|i| match (self.0 >> (2 * i)) & 0b11 {
                0b00 => Some(0),
                0b01 => Some(1),
                0b10 => Some(2),
                _ => None,
            })
            .collect()
    }

    pub fn from_settings(settings: &[u8]) -> Self {
        let mut bits = 0u8;
        for (i, &n) in settings.iter().enumerate() {
            bits |= match n {
                0 => 0,
                1 => 0b01,
                _ => 0b10,
            } << (2 * i);
        }
        Monomial(bits)
    }

    /// `χ_T(v)` at the packed assignment `v`.
    #[inline]
    pub fn character_at(self, v: usize) -> i32 {
        if (self.mask() & v).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Integer Fourier coefficients of a sign function, indexed by monomial mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FourierSpectrum {
    parties: usize,
    coeffs: Vec<i32>,
}

impl FourierSpectrum {
    /// A hand-authored spectrum. Whether it is sign-valued is checked by [`inverse_transform`].
    pub fn from_coeffs(parties: usize, coeffs: Vec<i32>) -> Result<Self> {
        check_parties(parties)?;
        if coeffs.len() != assignment_count(parties) {
            return Err(BellError::Parse(format!(
                "expected {} coefficients, got {}",
                assignment_count(parties),
                coeffs.len()
            )));
        }
        Ok(Self { parties, coeffs })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn coeff(&self, t: Monomial) -> i32 {
        self.coeffs[t.mask()]
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Monomial, i32)> + '_ {
        self.coeffs.iter().enumerate().map(|(t, &c)| (Monomial(t as u8), c))
    }

    /// `Σ_T ĝ(T)²`, which is `2^(4N)` for any sign-valued function.
    pub fn energy(&self) -> i64 {
        self.coeffs.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    /// Largest coefficient on a local product monomial, if any is nonzero.
    pub fn forbidden_component(&self) -> Option<(Monomial, i32)> {
        self.iter().find(|(t, c)| *c != 0 && t.is_local_product(self.parties))
    }
}

/// In-place unnormalized Walsh–Hadamard transform; `data.len()` must be a power of two.
pub(crate) fn fwht(data: &mut [i32]) {
    let n = data.len();
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for k in block..block + half {
                let (x, y) = (data[k], data[k + half]);
                data[k] = x + y;
                data[k + half] = x - y;
            }
        }
        half *= 2;
    }
}

pub fn fourier_transform(s: &SignFunction) -> FourierSpectrum {
    let mut data: Vec<i32> = (0..s.len()).map(|k| s.value(k) as i32).collect();
    fwht(&mut data);
    FourierSpectrum { parties: s.parties(), coeffs: data }
}

/// Reconstructs the sign function with the given spectrum.
pub fn inverse_transform(spectrum: &FourierSpectrum) -> Result<SignFunction> {
    let n = spectrum.coeffs.len() as i32;
    let mut data = spectrum.coeffs.clone();
    fwht(&mut data);
    for (v, x) in data.iter().enumerate() {
        if *x != n && *x != -n {
            return Err(BellError::NotSignValued { assignment: v });
        }
    }
    SignFunction::from_fn(spectrum.parties, |v| if data[v.encode()] > 0 { 1 } else { -1 })
}

/// Local block test: every party's two variables enter `s` without their product.
///
/// For each party and each assignment `r` of the other variables,
/// `s(+,+,r) + s(-,-,r) - s(+,-,r) - s(-,+,r)` must vanish. With entries stored
/// as bits this is `b(++) + b(--) = b(+-) + b(-+)`.
pub fn is_admissible(s: &SignFunction) -> bool {
    let parties = s.parties();
    let len = s.len();
    (0..parties).all(|i| {
        let u = 1usize << (2 * i);
        let w = u << 1;
        (0..len).filter(|r| r & (u | w) == 0).all(|r| {
            let b = |k: usize| s.bit(k) as u8;
            b(r) + b(r | u | w) == b(r | u) + b(r | w)
        })
    })
}

/// Spectral definition of admissibility, kept as an independent route.
pub fn is_admissible_spectral(s: &SignFunction) -> bool {
    fourier_transform(s).forbidden_component().is_none()
}

/// True iff the induced coefficient tensor has exactly one nonzero entry, of
/// magnitude `2^(2N)`, i.e. `s = ±χ_T` for an admissible `T`.
pub fn is_factorable(s: &SignFunction) -> bool {
    let spectrum = fourier_transform(s);
    let full = s.len() as i32;
    let mut nonzero = spectrum
        .iter()
        .filter(|(t, c)| *c != 0 && !t.is_local_product(spectrum.parties));
    matches!((nonzero.next(), nonzero.next()), (Some((_, c)), None) if c.abs() == full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::VariableAssignment;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const A: u8 = 0b0001;
    const B: u8 = 0b0010;
    const C: u8 = 0b0100;

    fn chsh_sign() -> SignFunction {
        // ½(1 + a + c - ac) is -1 only at a = c = -1
        SignFunction::from_fn(2, |v| if v.first(0) == -1 && v.first(1) == -1 { -1 } else { 1 }).unwrap()
    }

    fn random_sign(rng: &mut impl Rng, parties: usize) -> SignFunction {
        SignFunction::from_fn(parties, |_| if rng.gen::<bool>() { 1 } else { -1 }).unwrap()
    }

    /// Direct summation over assignments, independent of the butterfly.
    fn naive_spectrum(s: &SignFunction) -> Vec<i32> {
        (0..s.len())
            .map(|t| (0..s.len()).map(|v| s.value(v) as i32 * Monomial(t as u8).character_at(v)).sum())
            .collect()
    }

    #[test]
    fn constant_spectrum() {
        let spectrum = fourier_transform(&SignFunction::constant(2, 1).unwrap());
        assert_eq!(spectrum.coeff(Monomial::EMPTY), 16);
        assert!(spectrum.iter().skip(1).all(|(_, c)| c == 0));
    }

    #[test]
    fn projection_spectrum() {
        let spectrum = fourier_transform(&SignFunction::character(2, A as usize).unwrap());
        assert_eq!(spectrum.coeff(Monomial(A)), 16);
        assert_eq!(spectrum.iter().filter(|(_, c)| *c != 0).count(), 1);
    }

    #[test]
    fn chsh_spectrum() {
        let s = chsh_sign();
        let expected = naive_spectrum(&s);
        assert_eq!(expected[0], 8);
        assert_eq!(expected[A as usize], 8);
        assert_eq!(expected[C as usize], 8);
        assert_eq!(expected[(A | C) as usize], -8);
        assert_eq!(expected.iter().filter(|c| **c != 0).count(), 4);
        assert_eq!(fourier_transform(&s).coeffs(), &expected[..]);
    }

    #[test]
    fn inverse_rejects_non_sign_spectrum() {
        let mut coeffs = vec![0; 16];
        coeffs[0] = 1;
        let spectrum = FourierSpectrum::from_coeffs(2, coeffs).unwrap();
        assert!(matches!(inverse_transform(&spectrum), Err(BellError::NotSignValued { .. })));
        let mut coeffs = vec![0; 16];
        coeffs[0] = 16;
        let s = inverse_transform(&FourierSpectrum::from_coeffs(2, coeffs).unwrap()).unwrap();
        assert_eq!(s, SignFunction::constant(2, 1).unwrap());
        assert!(FourierSpectrum::from_coeffs(2, vec![0; 15]).is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&chsh_sign()));
        let ab = SignFunction::character(2, (A | B) as usize).unwrap();
        assert!(!is_admissible(&ab));
        assert_eq!(fourier_transform(&ab).coeff(Monomial(A | B)), 16);
    }

    #[test]
    fn factorable_examples() {
        assert!(is_factorable(&SignFunction::character(2, (A | C) as usize).unwrap()));
        assert!(!is_factorable(&chsh_sign()));
    }

    #[test]
    fn exhaustive_two_party_scan() {
        let mut admissible = 0;
        let mut factorable = 0;
        for bits in 0..(1u64 << 16) {
            let s = SignFunction::from_words(2, [bits, 0, 0, 0]).unwrap();
            let block = is_admissible(&s);
            assert_eq!(block, is_admissible_spectral(&s), "{s}");
            if block {
                admissible += 1;
                factorable += is_factorable(&s) as usize;
            }
        }
        assert_eq!(factorable, 18);
        assert_eq!(admissible, 90);
    }

    #[test]
    fn block_test_matches_spectral_three_parties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100_000 {
            let s = random_sign(&mut rng, 3);
            assert_eq!(is_admissible(&s), is_admissible_spectral(&s));
        }
        // random tables are almost never admissible; exercise the positive side too
        let s = SignFunction::from_fn(3, |v| v.first(0) * v.second(1) * v.first(2)).unwrap();
        assert!(is_admissible(&s) && is_admissible_spectral(&s));
    }

    #[test]
    fn monomial_settings_map() {
        assert_eq!(Monomial(A | C).to_settings(2), Some(vec![1, 1]));
        assert_eq!(Monomial(B).to_settings(2), Some(vec![2, 0]));
        assert_eq!(Monomial(A | B).to_settings(2), None);
        assert!(Monomial(A | B).is_local_product(2));
        assert_eq!(Monomial::from_settings(&[2, 1, 0]), Monomial(B | C));
    }

    fn swap_first_party(t: usize) -> usize {
        let low = t & 0b11;
        (t & !0b11) | ((low & 1) << 1) | (low >> 1)
    }

    proptest! {
        #[test]
        fn parseval_round_trip_and_negation(parties in 2usize..=4, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_sign(&mut rng, parties);
            let spectrum = fourier_transform(&s);
            prop_assert_eq!(spectrum.energy(), 1i64 << (4 * parties));
            prop_assert!(spectrum.coeffs().iter().all(|c| c % 2 == 0 && c.abs() <= s.len() as i32));
            prop_assert_eq!(inverse_transform(&spectrum).unwrap(), s);
            let neg = fourier_transform(&s.negated());
            prop_assert!(neg.coeffs().iter().zip(spectrum.coeffs()).all(|(a, b)| *a == -*b));
        }

        #[test]
        fn relabeling_covariance(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_sign(&mut rng, 3);
            let swapped = SignFunction::from_fn(3, |v| {
                let w = swap_first_party(v.encode());
                s.eval(VariableAssignment::new(3, w).unwrap())
            }).unwrap();
            let a = fourier_transform(&s);
            let b = fourier_transform(&swapped);
            for t in 0..64usize {
                prop_assert_eq!(b.coeffs()[t], a.coeffs()[swap_first_party(t)]);
            }
        }
    }
}
