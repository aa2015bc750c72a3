//! Variable assignments and bit-packed sign functions.
//!
//! Party `i` owns assignment bits `2i` (its first variable) and `2i + 1` (its
//! second variable). A clear bit stands for the value `+1`, a set bit for `-1`,
//! so the character of a monomial `T` at assignment `v` is `(-1)^popcount(T & v)`.

use crate::error::{BellError, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

pub const MIN_PARTIES: usize = 2;
pub const MAX_PARTIES: usize = 4;

const WORDS: usize = 4;

pub(crate) fn check_parties(parties: usize) -> Result<()> {
    if (MIN_PARTIES..=MAX_PARTIES).contains(&parties) {
        Ok(())
    } else {
        Err(BellError::UnsupportedSize(format!(
            "{parties} parties (supported: {MIN_PARTIES}..={MAX_PARTIES})"
        )))
    }
}

/// Number of dichotomic variables, `2N`.
#[inline]
pub fn variable_count(parties: usize) -> usize {
    2 * parties
}

/// Number of assignments, `2^(2N)`.
#[inline]
pub fn assignment_count(parties: usize) -> usize {
    1 << (2 * parties)
}

/// A point of `{±1}^(2N)`, packed into the low `2N` bits of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableAssignment {
    parties: u8,
    bits: u8,
}

impl VariableAssignment {
    pub fn new(parties: usize, bits: usize) -> Result<Self> {
        check_parties(parties)?;
        if bits >= assignment_count(parties) {
            return Err(BellError::Parse(format!(
                "assignment bits {bits:#b} exceed {} variables",
                variable_count(parties)
            )));
        }
        Ok(Self { parties: parties as u8, bits: bits as u8 })
    }

    /// Builds an assignment from `2N` values in `{+1, -1}`, ordered
    /// `(u_1, w_1, u_2, w_2, ...)`.
    pub fn from_values(values: &[i8]) -> Result<Self> {
        if values.len() % 2 != 0 {
            return Err(BellError::Parse("odd number of variables".into()));
        }
        let mut bits = 0;
        for (k, &v) in values.iter().enumerate() {
            match v {
                1 => {}
                -1 => bits |= 1 << k,
                _ => return Err(BellError::Parse(format!("variable value {v} is not ±1"))),
            }
        }
        Self::new(values.len() / 2, bits)
    }

    pub(crate) fn from_index_unchecked(parties: usize, bits: usize) -> Self {
        Self { parties: parties as u8, bits: bits as u8 }
    }

    pub fn all(parties: usize) -> impl Iterator<Item = VariableAssignment> {
        (0..assignment_count(parties)).map(move |b| Self::from_index_unchecked(parties, b))
    }

    pub fn parties(&self) -> usize {
        self.parties as usize
    }

    /// The packed index, i.e. the table position of this assignment.
    pub fn encode(&self) -> usize {
        self.bits as usize
    }

    pub fn decode(parties: usize, index: usize) -> Result<Self> {
        Self::new(parties, index)
    }

    /// Value `±1` of variable `k` (`k = 2i` or `2i + 1` for party `i`).
    pub fn value(&self, k: usize) -> i8 {
        if (self.bits >> k) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn first(&self, party: usize) -> i8 {
        self.value(2 * party)
    }

    pub fn second(&self, party: usize) -> i8 {
        self.value(2 * party + 1)
    }

    pub fn values(&self) -> Vec<i8> {
        (0..variable_count(self.parties())).map(|k| self.value(k)).collect()
    }
}

/// A `±1`-valued function on `{±1}^(2N)`, stored as a packed truth table.
///
/// Tables are ordered lexicographically by entry sequence, entry 0 first, with
/// `+1 < -1`. The constant `+1` function is therefore the least table.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignFunction {
    parties: u8,
    words: [u64; WORDS],
}

impl SignFunction {
    pub fn constant(parties: usize, value: i8) -> Result<Self> {
        check_parties(parties)?;
        let mut s = Self { parties: parties as u8, words: [0; WORDS] };
        if value == -1 {
            s = s.negated();
        } else if value != 1 {
            return Err(BellError::Parse(format!("sign value {value} is not ±1")));
        }
        Ok(s)
    }

    pub fn from_fn(parties: usize, mut f: impl FnMut(VariableAssignment) -> i8) -> Result<Self> {
        check_parties(parties)?;
        let mut s = Self { parties: parties as u8, words: [0; WORDS] };
        for v in VariableAssignment::all(parties) {
            match f(v) {
                1 => {}
                -1 => s.set_bit(v.encode(), true),
                other => {
                    return Err(BellError::Parse(format!(
                        "sign value {other} at assignment {} is not ±1",
                        v.encode()
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn from_values(parties: usize, values: &[i8]) -> Result<Self> {
        check_parties(parties)?;
        if values.len() != assignment_count(parties) {
            return Err(BellError::Parse(format!(
                "expected {} table entries, got {}",
                assignment_count(parties),
                values.len()
            )));
        }
        Self::from_fn(parties, |v| values[v.encode()])
    }

    /// The character `χ_T(v) = Π_{k∈T} v_k` of a monomial given as a bit mask.
    pub fn character(parties: usize, monomial: usize) -> Result<Self> {
        Self::from_fn(parties, |v| if (v.encode() & monomial).count_ones() % 2 == 0 { 1 } else { -1 })
    }

    /// Builds a table from its low-level words. Bits beyond the table are rejected.
    pub fn from_words(parties: usize, words: [u64; WORDS]) -> Result<Self> {
        check_parties(parties)?;
        let s = Self { parties: parties as u8, words };
        if s.masked().words != words {
            return Err(BellError::Parse("table bits set beyond the table length".into()));
        }
        Ok(s)
    }

    pub(crate) fn from_words_unchecked(parties: usize, words: [u64; WORDS]) -> Self {
        Self { parties: parties as u8, words }
    }

    fn masked(mut self) -> Self {
        let len = self.len();
        for (w, word) in self.words.iter_mut().enumerate() {
            let lo = w * 64;
            if lo >= len {
                *word = 0;
            } else if len - lo < 64 {
                *word &= (1u64 << (len - lo)) - 1;
            }
        }
        self
    }

    pub fn parties(&self) -> usize {
        self.parties as usize
    }

    /// Table length `2^(2N)`.
    pub fn len(&self) -> usize {
        assignment_count(self.parties())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> [u64; WORDS] {
        self.words
    }

    #[inline]
    pub fn bit(&self, index: usize) -> bool {
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, index: usize, set: bool) {
        let mask = 1u64 << (index & 63);
        if set {
            self.words[index >> 6] |= mask;
        } else {
            self.words[index >> 6] &= !mask;
        }
    }

    /// `s(v)` for the assignment with packed index `index`.
    #[inline]
    pub fn value(&self, index: usize) -> i8 {
        if self.bit(index) {
            -1
        } else {
            1
        }
    }

    pub fn eval(&self, v: VariableAssignment) -> i8 {
        self.value(v.encode())
    }

    pub fn values(&self) -> Vec<i8> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    pub fn negated(&self) -> Self {
        let mut out = *self;
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.masked()
    }

    /// Pointwise product, `(s·t)(v) = s(v)·t(v)`.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words) {
            *a ^= b;
        }
        out
    }

    /// Packed little-endian bytes: entry `k` is bit `k % 8` of byte `k / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len().div_ceil(8);
        self.words.iter().flat_map(|w| w.to_le_bytes()).take(n).collect()
    }

    pub fn from_bytes(parties: usize, bytes: &[u8]) -> Result<Self> {
        check_parties(parties)?;
        let n = assignment_count(parties).div_ceil(8);
        if bytes.len() != n {
            return Err(BellError::Parse(format!("expected {n} table bytes, got {}", bytes.len())));
        }
        let mut words = [0u64; WORDS];
        for (k, b) in bytes.iter().enumerate() {
            words[k / 8] |= (*b as u64) << (8 * (k % 8));
        }
        Self::from_words(parties, words)
    }

    /// Hex of the packed bytes, two lowercase digits per byte, byte 0 first.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(parties: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() % 2 != 0 {
            return Err(BellError::Parse("hex table has odd length".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| {
                u8::from_str_radix(&hex[i..i + 2], 16)
                    .map_err(|e| BellError::Parse(format!("bad hex table: {e}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bytes(parties, &bytes)
    }

    fn sort_key(&self) -> [u64; WORDS] {
        self.words.map(u64::reverse_bits)
    }
}

impl Ord for SignFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parties
            .cmp(&other.parties)
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for SignFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={};table={}", self.parties, self.to_hex())
    }
}

impl fmt::Debug for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignFunction({self})")
    }
}

/// Parses `N=<n>;table=<hex>`.
impl FromStr for SignFunction {
    type Err = BellError;

    fn from_str(s: &str) -> Result<Self> {
        let (n_part, table_part) = s
            .trim()
            .split_once(';')
            .ok_or_else(|| BellError::Parse(format!("expected `N=<n>;table=<hex>`, got `{s}`")))?;
        let n = n_part
            .trim()
            .strip_prefix("N=")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| BellError::Parse(format!("bad party count in `{s}`")))?;
        let hex = table_part
            .trim()
            .strip_prefix("table=")
            .ok_or_else(|| BellError::Parse(format!("missing `table=` in `{s}`")))?;
        Self::from_hex(n, hex)
    }
}
