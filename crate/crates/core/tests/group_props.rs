use homtest_core::analysis::signed_sum_histogram;
use homtest_core::group::{
    generated_subgroup, generates, partial_sums, Direction, Sign, SignedTuple,
    DEFAULT_PARTIAL_SUMS_CAP_LOG2, DEFAULT_SUBGROUP_CAP,
};
use homtest_core::{GroupElement, GroupSpec};
use proptest::prelude::*;

const SMALL: [&str; 9] = [
    "Z1", "Z7", "Z12", "F2^5", "F3^3", "S4", "D5", "Z3xS3", "F2^2xZ3",
];

fn group_and_elems(n: usize) -> impl Strategy<Value = (GroupSpec, Vec<GroupElement>)> {
    (0..SMALL.len(), prop::collection::vec(any::<u64>(), n)).prop_map(|(i, raw)| {
        let g: GroupSpec = SMALL[i].parse().unwrap();
        let xs = raw
            .iter()
            .map(|r| g.element_at(r % g.order() as u64))
            .collect();
        (g, xs)
    })
}

fn sign(b: bool) -> Sign {
    if b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

proptest! {
    #[test]
    fn axioms_hold_on_random_triples((g, xs) in group_and_elems(3)) {
        let (a, b, c) = (xs[0], xs[1], xs[2]);
        let e = g.identity();
        prop_assert!(g.contains(g.op(a, b)));
        prop_assert_eq!(g.op(g.op(a, b), c), g.op(a, g.op(b, c)));
        prop_assert_eq!(g.op(a, e), a);
        prop_assert_eq!(g.op(e, a), a);
        prop_assert_eq!(g.op(a, g.inverse(a)), e);
        prop_assert_eq!(g.op(g.inverse(a), a), e);
        prop_assert_eq!(g.element_at(g.index_of(a)), a);
    }

    #[test]
    fn abelian_sums_ignore_direction((g, xs) in group_and_elems(5), signs in prop::collection::vec(any::<bool>(), 5)) {
        prop_assume!(g.is_abelian());
        let t = SignedTuple::from_signs(signs.iter().map(|b| sign(*b)).zip(xs));
        prop_assert_eq!(
            g.signed_sum(&t, Direction::Increasing).unwrap(),
            g.signed_sum(&t, Direction::Decreasing).unwrap()
        );
    }

    #[test]
    fn partial_sums_lie_in_generated_subgroup((g, xs) in group_and_elems(4)) {
        let sums = partial_sums(&g, &xs, DEFAULT_PARTIAL_SUMS_CAP_LOG2).unwrap();
        let sub = generated_subgroup(&g, &xs, DEFAULT_SUBGROUP_CAP).unwrap();
        for s in &sums {
            prop_assert!(sub.binary_search(s).is_ok());
        }
    }

    #[test]
    fn rank_and_closure_agree_on_vector_spaces(
        (p, n) in prop_oneof![Just((2u64, 12u32)), Just((2, 6)), Just((3, 7)), Just((5, 5)), Just((7, 4))],
        len in 0usize..9,
        seed in any::<u64>(),
    ) {
        let g = GroupSpec::vector_space(p, n).unwrap();
        let mut state = seed;
        let xs: Vec<GroupElement> = (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                g.element_at((state >> 11) % g.order() as u64)
            })
            .collect();
        let closure = generated_subgroup(&g, &xs, 1 << 12).unwrap().len() as u128 == g.order();
        prop_assert_eq!(generates(&g, &xs).unwrap(), closure);
    }
}

/// Brute force: every `(signs, elements)` choice of length `k`.
fn brute_histogram(g: &GroupSpec, k: usize) -> Vec<u128> {
    let n = g.order() as u64;
    let mut hist = vec![0u128; n as usize];
    let total = (2 * n).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut t = SignedTuple::new();
        for _ in 0..k {
            t.push(sign(c % 2 == 0), g.element_at((c / 2) % n));
            c /= 2 * n;
        }
        hist[g.index_of(g.signed_sum(&t, Direction::Increasing).unwrap()) as usize] += 1;
    }
    hist
}

#[test]
fn signed_sums_are_uniform() {
    for gs in ["Z5", "Z6", "F2^3", "S3", "D4"] {
        let g: GroupSpec = gs.parse().unwrap();
        for k in 1..=3 {
            let hist = signed_sum_histogram(&g, k).unwrap();
            assert_eq!(hist, brute_histogram(&g, k), "{gs} k={k}");
            assert!(hist.iter().all(|c| *c == hist[0]), "{gs} k={k}");
        }
    }
}

#[test]
fn s3_has_direction_dependent_tuple() {
    let g = GroupSpec::symmetric(3).unwrap();
    let a = g.permutation(&[1, 0, 2]).unwrap();
    let b = g.permutation(&[0, 2, 1]).unwrap();
    let t = SignedTuple::from_signs([(Sign::Plus, a), (Sign::Plus, b)]);
    assert_ne!(
        g.signed_sum(&t, Direction::Increasing).unwrap(),
        g.signed_sum(&t, Direction::Decreasing).unwrap()
    );
}

#[test]
fn partial_sums_can_miss_the_generated_subgroup() {
    let g = GroupSpec::cyclic(5).unwrap();
    let s = [g.residue(2).unwrap()];
    assert!(generates(&g, &s).unwrap());
    assert_eq!(
        partial_sums(&g, &s, DEFAULT_PARTIAL_SUMS_CAP_LOG2)
            .unwrap()
            .len(),
        2
    );
}
