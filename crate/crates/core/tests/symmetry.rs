use bellfacets::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn n3() -> &'static [SignFunction] {
    static CELL: OnceLock<Vec<SignFunction>> = OnceLock::new();
    CELL.get_or_init(|| enumerate_admissible(3, EnumerationMode::Backtracking).unwrap())
}

fn group3() -> &'static SymmetryGroup {
    static CELL: OnceLock<SymmetryGroup> = OnceLock::new();
    CELL.get_or_init(|| SymmetryGroup::new(3).unwrap())
}

#[test]
fn canonicalize_idempotent_on_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in n3().choose_multiple(&mut rng, 1000) {
        let c = canonicalize(s);
        assert_eq!(canonicalize(&c), c);
        assert!(c <= *s);
        assert!(n3().binary_search(&c).is_ok());
    }
}

#[test]
fn chsh_variants_share_representative() {
    // ½(1 + a + c − ac) with relabellings a → −a, c → −c, overall sign and party swap
    let mut reps = Vec::new();
    for (na, nc, flip, swap) in variants() {
        let s = SignFunction::from_fn(2, |v| {
            let (mut a, mut c) = (v.first(0), v.first(1));
            if swap {
                std::mem::swap(&mut a, &mut c);
            }
            a *= na;
            c *= nc;
            flip * if a == -1 && c == -1 { -1 } else { 1 }
        })
        .unwrap();
        assert!(is_admissible(&s) && !is_factorable(&s));
        reps.push(canonicalize(&s));
    }
    reps.dedup();
    assert_eq!(reps.len(), 1);
}

fn variants() -> Vec<(i8, i8, i8, bool)> {
    let mut out = Vec::new();
    for na in [1, -1] {
        for nc in [1, -1] {
            for flip in [1, -1] {
                for swap in [false, true] {
                    out.push((na, nc, flip, swap));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_action_preserves_facets(i in 0usize..51_678, g in 0usize..6144) {
        let s = n3()[i];
        let g = &group3().elements()[g];
        let t = g.apply(&s);
        prop_assert!(is_admissible(&t));
        prop_assert_eq!(is_factorable(&t), is_factorable(&s));
        prop_assert_eq!(canonicalize(&t), canonicalize(&s));
        let a = inequality_from_sign_function(&s).unwrap();
        let b = inequality_from_sign_function(&t).unwrap();
        prop_assert_eq!(lhv_max(&b), lhv_max(&a));
        let mut ca: Vec<i64> = a.coeffs.iter().map(|c| c.abs()).collect();
        let mut cb: Vec<i64> = b.coeffs.iter().map(|c| c.abs()).collect();
        ca.sort_unstable();
        cb.sort_unstable();
        prop_assert_eq!(ca, cb);
    }

    #[test]
    fn composition_matches_sequential_action(i in 0usize..51_678, g in 0usize..6144, h in 0usize..6144) {
        let s = n3()[i];
        let (g, h) = (&group3().elements()[g], &group3().elements()[h]);
        prop_assert_eq!(g.compose(h).apply(&s), g.apply(&h.apply(&s)));
    }
}
