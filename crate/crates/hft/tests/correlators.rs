use hft::correlators::{correlator, sweep, verify_main_lemma, verify_string, Correlators, Identity, Insertion, SweepBounds};
use hft::examples::{fixture, point_algebra, GOOD_FIXTURES};
use hft::psi::psi_intersection;
use hft::rational::{int, zero};
use proptest::prelude::*;

#[test]
fn point_reproduces_psi_numbers() {
    let p = point_algebra();
    for g in 0..=2u32 {
        for n in 1..=4usize {
            if 2 * g as usize + n <= 2 {
                continue;
            }
            let dim = 3 * g + n as u32 - 3;
            let mut powers = vec![0u32; n];
            loop {
                if powers.iter().sum::<u32>() == dim {
                    let ins: Vec<Insertion> = powers.iter().map(|&a| Insertion::basis(&p, a, 0)).collect();
                    assert_eq!(correlator(&p, g, &ins).unwrap(), psi_intersection(g, &powers), "g={g} {powers:?}");
                }
                let mut k = 0;
                while k < n && powers[k] == dim {
                    powers[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
                powers[k] += 1;
            }
        }
    }
}

#[test]
fn string_and_dilaton_on_small_bounds() {
    for name in GOOD_FIXTURES {
        let alg = fixture(name).unwrap();
        let b = SweepBounds { max_genus: 1, max_n: 3, max_psi_sum: 3, full_basis: false };
        assert!(sweep(&alg, Identity::String, b).unwrap().iter().all(|r| r.pass), "{name} string");
        let b = SweepBounds { full_basis: true, ..b };
        assert!(sweep(&alg, Identity::Dilaton, b).unwrap().iter().all(|r| r.pass), "{name} dilaton");
    }
}

// The string equation needs H₀ insertions: with two H₄ vectors it breaks.
#[test]
fn string_fails_with_h4_insertions() {
    let alg = fixture("block6").unwrap();
    let ctx = Correlators::new(&alg).unwrap();
    let e = |a, i| Insertion::basis(&alg, a, i);
    let rep = verify_string(&ctx, 0, &[e(0, 0), e(0, 0), e(0, 3), e(1, 3)]).unwrap();
    assert_eq!((rep.left, rep.right), (int(3), int(2)));
}

// Q and ψG₋ contributions come out equal, not opposite.
#[test]
fn main_lemma_holds_with_equal_sides() {
    for name in ["point", "frobenius3", "block6"] {
        let alg = fixture(name).unwrap();
        let b = SweepBounds { max_genus: 1, max_n: 4, max_psi_sum: 2, full_basis: true };
        for r in sweep(&alg, Identity::MainLemma, b).unwrap() {
            assert_eq!(&r.left + &r.right, zero(), "{name} {}", r.params);
        }
    }
}

#[test]
fn main_lemma_as_stated_breaks_on_block6() {
    let alg = fixture("block6").unwrap();
    let ctx = Correlators::new(&alg).unwrap();
    let ins: Vec<Insertion> = [0, 0, 2, 3].iter().map(|&i| Insertion::basis(&alg, 0, i)).collect();
    let rep = verify_main_lemma(&ctx, 0, &ins).unwrap();
    assert_eq!((rep.left, rep.right), (int(2), int(-2)));
    assert!(!rep.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn memo_agrees_with_direct(g in 0u32..2, raw in proptest::collection::vec((0u32..3, 0usize..6), 1..5)) {
        let alg = fixture("block6").unwrap();
        let ctx = Correlators::new(&alg).unwrap();
        let ins: Vec<Insertion> = raw.iter().map(|&(a, i)| Insertion::basis(&alg, a, i)).collect();
        if let Ok(direct) = correlator(&alg, g, &ins) {
            prop_assert_eq!(ctx.eval(g, &ins).unwrap(), direct);
        }
    }

    // Swapping neighbours costs (−1) exactly when both are odd.
    #[test]
    fn graded_symmetry(g in 0u32..2, raw in proptest::collection::vec((0u32..3, 0usize..6), 2..5), k in 0usize..4) {
        let alg = fixture("block6").unwrap();
        let ctx = Correlators::new(&alg).unwrap();
        let k = k % (raw.len() - 1);
        let ins: Vec<Insertion> = raw.iter().map(|&(a, i)| Insertion::basis(&alg, a, i)).collect();
        let mut swapped = ins.clone();
        swapped.swap(k, k + 1);
        let both_odd = alg.parity(raw[k].1).is_odd() && alg.parity(raw[k + 1].1).is_odd();
        if let (Ok(a), Ok(b)) = (ctx.eval(g, &ins), ctx.eval(g, &swapped)) {
            prop_assert_eq!(a, if both_odd { -b } else { b });
        }
    }
}
