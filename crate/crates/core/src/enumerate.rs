//! Enumeration of admissible sign functions.
//!
//! Backtracking assigns the table in blocks of four entries, one block per
//! assignment of the variables of parties `2..N`. Each block holds the values
//! of party 1's variable pair and is drawn from the six local sign patterns
//! (`±1`, `±u`, `±w`), which settles party 1's block condition by
//! construction. The block condition of party `j > 1` is checked as soon as
//! the last of the four blocks it spans is placed.

use crate::error::{BellError, Result};
use crate::fourier::is_admissible;
use crate::sign::{assignment_count, check_parties, SignFunction};
use rayon::prelude::*;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// The six admissible sign patterns of one party's variable pair, as nibbles
/// (bit `j` is entry `j`), in lexicographic entry order.
const LOCAL_PATTERNS: [u8; 6] = [0x0, 0xC, 0xA, 0x5, 0x3, 0xF];

pub const DEFAULT_CHECKPOINT_INTERVAL: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Scan all `2^(2^(2N))` tables. Two parties only.
    Exhaustive,
    Backtracking,
}

fn nibble(s: &SignFunction, block: usize) -> u8 {
    let bit = 4 * block;
    ((s.words()[bit >> 6] >> (bit & 63)) & 0xF) as u8
}

fn with_nibble(words: &mut [u64; 4], block: usize, value: u8) {
    let bit = 4 * block;
    let w = &mut words[bit >> 6];
    *w = (*w & !(0xF << (bit & 63))) | ((value as u64) << (bit & 63));
}

fn pattern_rank(n: u8) -> usize {
    LOCAL_PATTERNS.iter().position(|&p| p == n).expect("admissible block")
}

struct Search {
    parties: usize,
    blocks: usize,
}

impl Search {
    fn new(parties: usize) -> Self {
        Self { parties, blocks: assignment_count(parties) / 4 }
    }

    #[inline]
    fn block_of(words: &[u64; 4], block: usize) -> u8 {
        let bit = 4 * block;
        ((words[bit >> 6] >> (bit & 63)) & 0xF) as u8
    }

    /// Checks the block conditions of parties `2..N` completed by placing `block`.
    fn consistent(&self, words: &[u64; 4], block: usize) -> bool {
        for j in 1..self.parties {
            let stride = 1usize << (2 * (j - 1));
            if (block / stride) & 3 != 3 {
                continue;
            }
            let base = block - 3 * stride;
            let n0 = Self::block_of(words, base);
            let n1 = Self::block_of(words, base + stride);
            let n2 = Self::block_of(words, base + 2 * stride);
            let n3 = Self::block_of(words, base + 3 * stride);
            // per entry: b(++) + b(--) = b(+-) + b(-+)
            if (n0 ^ n3) != (n1 ^ n2) || (n0 & n3) != (n1 & n2) {
                return false;
            }
        }
        true
    }

    /// Depth-first search below `level`. While `floor` is `Some`, the current
    /// prefix equals the floor's prefix and only branches at or above it are
    /// explored; the floor table itself is not emitted.
    fn dfs(
        &self,
        words: &mut [u64; 4],
        level: usize,
        floor: Option<&SignFunction>,
        out: &mut Vec<SignFunction>,
    ) {
        if level == self.blocks {
            if floor.is_none() {
                out.push(SignFunction::from_words_unchecked(self.parties, *words));
            }
            return;
        }
        let start = floor.map_or(0, |f| pattern_rank(nibble(f, level)));
        for (rank, &p) in LOCAL_PATTERNS.iter().enumerate().skip(start) {
            with_nibble(words, level, p);
            if self.consistent(words, level) {
                let tight = if rank == start { floor } else { None };
                self.dfs(words, level + 1, tight, out);
            }
        }
        with_nibble(words, level, 0);
    }

    /// Search subtrees keyed by the first two blocks (first 8 entries), in order.
    fn prefixes(&self) -> Vec<(u8, u8)> {
        LOCAL_PATTERNS
            .iter()
            .flat_map(|&a| LOCAL_PATTERNS.iter().map(move |&b| (a, b)))
            .collect()
    }

    fn run_prefix(&self, prefix: (u8, u8), floor: Option<&SignFunction>) -> Vec<SignFunction> {
        let mut out = Vec::new();
        let key = |p: (u8, u8)| (pattern_rank(p.0), pattern_rank(p.1));
        let tight = match floor {
            Some(f) => {
                let fp = (nibble(f, 0), nibble(f, 1));
                match key(prefix).cmp(&key(fp)) {
                    std::cmp::Ordering::Less => return out,
                    std::cmp::Ordering::Equal => Some(f),
                    std::cmp::Ordering::Greater => None,
                }
            }
            None => None,
        };
        let mut words = [0u64; 4];
        with_nibble(&mut words, 0, prefix.0);
        with_nibble(&mut words, 1, prefix.1);
        if self.consistent(&words, 0) && self.consistent(&words, 1) {
            self.dfs(&mut words, 2, tight, &mut out);
        }
        out
    }
}

/// Builder for an enumeration run.
#[derive(Debug, Clone)]
pub struct Enumeration {
    parties: usize,
    mode: EnumerationMode,
    workers: usize,
    checkpoint: Option<PathBuf>,
    checkpoint_interval: usize,
    resume: Option<Checkpoint>,
}

impl Enumeration {
    pub fn new(parties: usize, mode: EnumerationMode) -> Result<Self> {
        check_parties(parties)?;
        if mode == EnumerationMode::Exhaustive && parties >= 3 {
            return Err(BellError::UnsupportedSize(format!(
                "exhaustive enumeration requested for {parties} parties"
            )));
        }
        Ok(Self {
            parties,
            mode,
            workers: 1,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            resume: None,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Writes the stream so far to `path` each time another `interval`
    /// functions have been accepted, and once more on completion.
    pub fn checkpoint(mut self, path: impl Into<PathBuf>, interval: usize) -> Self {
        self.checkpoint = Some(path.into());
        self.checkpoint_interval = interval.max(1);
        self
    }

    /// Continues after the last table of a previous run's checkpoint.
    pub fn resume(mut self, checkpoint: Checkpoint) -> Result<Self> {
        if checkpoint.parties != self.parties {
            return Err(BellError::Parse(format!(
                "checkpoint is for {} parties, run is for {}",
                checkpoint.parties, self.parties
            )));
        }
        self.resume = Some(checkpoint);
        Ok(self)
    }

    /// Runs to completion, feeding every admissible function to `sink` in
    /// lexicographic order.
    pub fn run(&self, mut sink: impl FnMut(&SignFunction)) -> Result<usize> {
        let mut all: Vec<SignFunction> = Vec::new();
        let mut next_checkpoint = self.checkpoint_interval;
        if let Some(ckpt) = &self.resume {
            for s in &ckpt.tables {
                sink(s);
            }
            all.extend_from_slice(&ckpt.tables);
            next_checkpoint = (all.len() / self.checkpoint_interval + 1) * self.checkpoint_interval;
        }
        match self.mode {
            EnumerationMode::Exhaustive => {
                let floor = all.last().copied();
                let mut found: Vec<SignFunction> = (0..1u64 << 16)
                    .map(|bits| SignFunction::from_words_unchecked(2, [bits, 0, 0, 0]))
                    .filter(|s| is_admissible(s) && floor.is_none_or(|f| *s > f))
                    .collect();
                found.sort();
                for s in &found {
                    sink(s);
                }
                all.extend(found);
            }
            EnumerationMode::Backtracking => {
                let search = Search::new(self.parties);
                let floor = all.last().copied();
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(self.workers)
                    .build()
                    .map_err(|e| BellError::Io(e.to_string()))?;
                for chunk in search.prefixes().chunks(self.workers) {
                    let parts: Vec<Vec<SignFunction>> = pool.install(|| {
                        chunk.par_iter().map(|&p| search.run_prefix(p, floor.as_ref())).collect()
                    });
                    for part in parts {
                        for s in &part {
                            sink(s);
                        }
                        all.extend(part);
                    }
                    if let Some(path) = &self.checkpoint {
                        if all.len() >= next_checkpoint {
                            Checkpoint::new(self.parties, all.clone()).write(path)?;
                            next_checkpoint = (all.len() / self.checkpoint_interval + 1)
                                * self.checkpoint_interval;
                        }
                    }
                }
            }
        }
        if let Some(path) = &self.checkpoint {
            Checkpoint::new(self.parties, all.clone()).write(path)?;
        }
        Ok(all.len())
    }

    pub fn collect(&self) -> Result<Vec<SignFunction>> {
        let mut out = Vec::new();
        self.run(|s| out.push(*s))?;
        Ok(out)
    }
}

/// Every admissible sign function for `parties`, in lexicographic order.
pub fn enumerate_admissible(parties: usize, mode: EnumerationMode) -> Result<Vec<SignFunction>> {
    Enumeration::new(parties, mode)?.collect()
}

const MAGIC: &[u8; 8] = b"BELLENUM";
const VERSION: u16 = 1;

/// Packed tables accepted so far, with a 16-byte header:
/// magic `BELLENUM`, version `u16`, party count `u16`, table count `u32`,
/// all little-endian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub parties: usize,
    pub tables: Vec<SignFunction>,
}

impl Checkpoint {
    pub fn new(parties: usize, tables: Vec<SignFunction>) -> Self {
        Self { parties, tables }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.tables.len() * assignment_count(self.parties) / 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.parties as u16).to_le_bytes());
        out.extend_from_slice(&(self.tables.len() as u32).to_le_bytes());
        for t in &self.tables {
            out.extend_from_slice(&t.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(BellError::Parse("not a checkpoint file".into()));
        }
        let version = u16::from_le_bytes([bytes[8], bytes[9]]);
        if version != VERSION {
            return Err(BellError::Parse(format!("unsupported checkpoint version {version}")));
        }
        let parties = u16::from_le_bytes([bytes[10], bytes[11]]) as usize;
        check_parties(parties)?;
        let count = u32::from_le_bytes([bytes[12], bytes[13], bytes[14], bytes[15]]) as usize;
        let width = assignment_count(parties) / 8;
        let body = &bytes[16..];
        if body.len() != count * width {
            return Err(BellError::Parse(format!(
                "checkpoint declares {count} tables but holds {} bytes",
                body.len()
            )));
        }
        let tables = body
            .chunks_exact(width)
            .map(|c| SignFunction::from_bytes(parties, c))
            .collect::<Result<_>>()?;
        Ok(Self { parties, tables })
    }

    /// Writes atomically through a sibling temporary file.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_patterns_are_sorted_and_admissible() {
        let tables: Vec<SignFunction> = LOCAL_PATTERNS
            .iter()
            .map(|&p| SignFunction::from_words_unchecked(2, [p as u64 * 0x1111, 0, 0, 0]))
            .collect();
        assert!(tables.windows(2).all(|w| w[0] < w[1]));
        assert!(tables.iter().all(is_admissible));
    }

    #[test]
    fn modes_agree_for_two_parties() {
        let a = enumerate_admissible(2, EnumerationMode::Exhaustive).unwrap();
        let b = enumerate_admissible(2, EnumerationMode::Backtracking).unwrap();
        assert_eq!(a.len(), 90);
        assert_eq!(a, b);
    }

    #[test]
    fn size_errors() {
        assert!(matches!(
            Enumeration::new(3, EnumerationMode::Exhaustive),
            Err(BellError::UnsupportedSize(_))
        ));
        assert!(Enumeration::new(5, EnumerationMode::Backtracking).is_err());
    }

    #[test]
    fn worker_count_does_not_change_stream() {
        let one = Enumeration::new(3, EnumerationMode::Backtracking).unwrap().collect().unwrap();
        let four = Enumeration::new(3, EnumerationMode::Backtracking).unwrap().workers(4).collect().unwrap();
        assert_eq!(one.len(), 51_678);
        assert!(one.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(one, four);
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(Checkpoint::from_bytes(b"BELLENUM").is_err());
        let mut bytes = Checkpoint::new(2, vec![SignFunction::constant(2, 1).unwrap()]).to_bytes();
        bytes.push(0);
        assert!(Checkpoint::from_bytes(&bytes).is_err());
    }
}
