//! Relabeling symmetries of sign functions: party permutations, per-party
//! variable swaps and negations, and the global sign flip.

use crate::error::Result;
use crate::sign::{assignment_count, check_parties, SignFunction};
use std::collections::HashSet;

/// One group element. It acts on sign functions by
/// `(g·s)(v) = (-1)^flip · s(w)`, where party `i` of `w` takes the variable pair
/// of party `party_permutation[i]` of `v`, swapped if `swap[i]` and then xored
/// with the two-bit negation mask `negate[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetryElement {
    pub party_permutation: Vec<u8>,
    pub swap: Vec<bool>,
    pub negate: Vec<u8>,
    pub flip: bool,
}

#[inline]
fn swap_pair(pair: u8) -> u8 {
    ((pair & 1) << 1) | ((pair >> 1) & 1)
}

impl SymmetryElement {
    pub fn identity(parties: usize) -> Self {
        Self {
            party_permutation: (0..parties as u8).collect(),
            swap: vec![false; parties],
            negate: vec![0; parties],
            flip: false,
        }
    }

    pub fn parties(&self) -> usize {
        self.party_permutation.len()
    }

    fn transform_pair(&self, i: usize, pair: u8) -> u8 {
        let p = if self.swap[i] { swap_pair(pair) } else { pair };
        p ^ self.negate[i]
    }

    /// Packed index `w` read by `(g·s)` at assignment `v`.
    pub fn source_index(&self, v: usize) -> usize {
        let mut w = 0usize;
        for i in 0..self.parties() {
            let src = self.party_permutation[i] as usize;
            let pair = ((v >> (2 * src)) & 0b11) as u8;
            w |= (self.transform_pair(i, pair) as usize) << (2 * i);
        }
        w
    }

    /// The element `g∘h`, satisfying `compose(g, h)·s = g·(h·s)`.
    pub fn compose(&self, h: &SymmetryElement) -> SymmetryElement {
        let g = self;
        let n = g.parties();
        let mut out = SymmetryElement::identity(n);
        for k in 0..n {
            let m = h.party_permutation[k] as usize;
            out.party_permutation[k] = g.party_permutation[m];
            out.swap[k] = g.swap[m] ^ h.swap[k];
            let carried = if h.swap[k] { swap_pair(g.negate[m]) } else { g.negate[m] };
            out.negate[k] = carried ^ h.negate[k];
        }
        out.flip = g.flip ^ h.flip;
        out
    }

    pub fn apply(&self, s: &SignFunction) -> SignFunction {
        CompiledElement::new(self).apply(s)
    }
}

/// An element lowered to an index gather table.
#[derive(Debug, Clone)]
pub(crate) struct CompiledElement {
    source: Vec<u8>,
    flip: bool,
}

impl CompiledElement {
    fn new(g: &SymmetryElement) -> Self {
        let len = assignment_count(g.parties());
        Self { source: (0..len).map(|v| g.source_index(v) as u8).collect(), flip: g.flip }
    }

    #[inline]
    pub(crate) fn apply(&self, s: &SignFunction) -> SignFunction {
        let mut words = [0u64; 4];
        for (v, &src) in self.source.iter().enumerate() {
            if s.bit(src as usize) {
                words[v >> 6] |= 1 << (v & 63);
            }
        }
        let out = SignFunction::from_words_unchecked(s.parties(), words);
        if self.flip {
            out.negated()
        } else {
            out
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (n - 1) as u8);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The full relabeling group for `N` parties, of order `N!·8^N·2`.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    parties: usize,
    elements: Vec<SymmetryElement>,
    compiled: Vec<CompiledElement>,
}

impl SymmetryGroup {
    pub fn new(parties: usize) -> Result<Self> {
        check_parties(parties)?;
        let mut elements = Vec::new();
        let local_count = 8usize.pow(parties as u32);
        for perm in permutations(parties) {
            for local in 0..local_count {
                for flip in [false, true] {
                    let mut g = SymmetryElement::identity(parties);
                    g.party_permutation = perm.clone();
                    for i in 0..parties {
                        let code = (local >> (3 * i)) & 0b111;
                        g.swap[i] = code & 0b100 != 0;
                        g.negate[i] = (code & 0b11) as u8;
                    }
                    g.flip = flip;
                    elements.push(g);
                }
            }
        }
        let compiled = elements.iter().map(CompiledElement::new).collect();
        Ok(Self { parties, elements, compiled })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SymmetryElement] {
        &self.elements
    }

    pub fn orbit(&self, s: &SignFunction) -> Vec<SignFunction> {
        let set: HashSet<SignFunction> = self.compiled.iter().map(|g| g.apply(s)).collect();
        let mut orbit: Vec<_> = set.into_iter().collect();
        orbit.sort();
        orbit
    }

    /// Lexicographically least table in the orbit of `s`.
    pub fn canonicalize(&self, s: &SignFunction) -> SignFunction {
        self.compiled.iter().map(|g| g.apply(s)).min().expect("group contains the identity")
    }
}

/// Convenience wrapper building the group on every call.
pub fn canonicalize(s: &SignFunction) -> SignFunction {
    SymmetryGroup::new(s.parties())
        .expect("sign functions carry a supported party count")
        .canonicalize(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::is_admissible;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut impl Rng, group: &SymmetryGroup) -> SymmetryElement {
        group.elements()[rng.gen_range(0..group.order())].clone()
    }

    fn random_sign(rng: &mut impl Rng, parties: usize) -> SignFunction {
        SignFunction::from_fn(parties, |_| if rng.gen::<bool>() { 1 } else { -1 }).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(SymmetryGroup::new(2).unwrap().order(), 2 * 64 * 2);
        assert_eq!(SymmetryGroup::new(3).unwrap().order(), 6 * 512 * 2);
    }

    #[test]
    fn composition_matches_sequential_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for parties in [2, 3] {
            let group = SymmetryGroup::new(parties).unwrap();
            for _ in 0..300 {
                let (g, h, k) = (
                    random_element(&mut rng, &group),
                    random_element(&mut rng, &group),
                    random_element(&mut rng, &group),
                );
                let s = random_sign(&mut rng, parties);
                assert_eq!(g.compose(&h).apply(&s), g.apply(&h.apply(&s)));
                assert_eq!(g.compose(&h).compose(&k), g.compose(&h.compose(&k)));
                assert_eq!(SymmetryElement::identity(parties).compose(&g), g);
            }
        }
    }

    #[test]
    fn constant_orbit() {
        let group = SymmetryGroup::new(2).unwrap();
        let plus = SignFunction::constant(2, 1).unwrap();
        let minus = SignFunction::constant(2, -1).unwrap();
        assert_eq!(group.orbit(&plus), vec![plus, minus]);
        assert_eq!(group.canonicalize(&minus), plus);
    }

    #[test]
    fn preserves_admissibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let group = SymmetryGroup::new(2).unwrap();
        let chsh =
            SignFunction::from_fn(2, |v| if v.first(0) == -1 && v.first(1) == -1 { -1 } else { 1 }).unwrap();
        for _ in 0..200 {
            let g = random_element(&mut rng, &group);
            let image = g.apply(&chsh);
            assert!(is_admissible(&image));
            assert_eq!(group.canonicalize(&image), group.canonicalize(&chsh));
        }
    }
}
