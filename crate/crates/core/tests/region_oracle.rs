//! The region relation checked against a signature computed on integer
//! numerators over a common denominator, without the crate's rationals.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use hourglass::oracle::enumerate_regions;
use hourglass::regions::{equivalent, region_count_bound, region_of, representative, EquivalenceOptions, Interval};
use hourglass::{ClockBounds, ClockValuation, Rational, Scalar};
use proptest::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Clock {
    Above,
    Within { floor: i64, integral: bool, half: Option<Ordering> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    clocks: Vec<Clock>,
    /// `(order of fr(x), fr(y); order of fr(x) + fr(y), 1)` for each pair of
    /// clocks at or below their bounds.
    pairs: Vec<(usize, usize, Ordering, Ordering)>,
}

/// Valuation `k_i / den` against bounds `c`.
fn signature(ks: &[i64], den: i64, c: &[u32], refined: bool) -> Signature {
    let clocks: Vec<Clock> = ks
        .iter()
        .zip(c)
        .map(|(&k, &c)| {
            if k > i64::from(c) * den {
                Clock::Above
            } else {
                let fr = k % den;
                Clock::Within { floor: k / den, integral: fr == 0, half: refined.then(|| (2 * fr).cmp(&den)) }
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            if clocks[i] != Clock::Above && clocks[j] != Clock::Above {
                let (fi, fj) = (ks[i] % den, ks[j] % den);
                pairs.push((i, j, fi.cmp(&fj), (fi + fj).cmp(&den)));
            }
        }
    }
    Signature { clocks, pairs }
}

fn valuation(ks: &[i64], den: i64) -> ClockValuation<Rational> {
    ClockValuation::from_values(ks.iter().map(|&k| Rational::from_ratio(k, den)).collect())
}

fn grid_signatures(c: &[u32], den: i64, refined: bool) -> BTreeSet<Signature> {
    let mut out = BTreeSet::new();
    let mut ks = vec![0i64; c.len()];
    loop {
        out.insert(signature(&ks, den, c, refined));
        let mut pos = 0;
        while pos < ks.len() {
            ks[pos] += 1;
            if ks[pos] <= (i64::from(c[pos]) + 1) * den {
                break;
            }
            ks[pos] = 0;
            pos += 1;
        }
        if pos == ks.len() {
            return out;
        }
    }
}

fn opts(refined: bool) -> EquivalenceOptions {
    EquivalenceOptions { refine_half_points: refined, ..Default::default() }
}

#[test]
fn region_counts_match_the_signature_count() {
    for (c, refined) in
        [(vec![1], false), (vec![1, 1], false), (vec![2, 1], false), (vec![1, 1], true), (vec![1], true)]
    {
        let bounds = ClockBounds::new(c.clone()).unwrap();
        let expected = grid_signatures(&c, 16, refined).len();
        let found = enumerate_regions(&bounds, &opts(refined), &Rational::from_ratio(1, 16)).len();
        assert_eq!(found, expected, "c={c:?} refined={refined}");
        assert_eq!(grid_signatures(&c, 32, refined).len(), expected, "c={c:?}: grid 1/16 misses classes");
    }
    assert_eq!(grid_signatures(&[1], 16, false).len(), 4);
    assert_eq!(grid_signatures(&[1, 1], 16, false).len(), 24);
}

#[test]
fn two_clock_representatives_use_sixteenths() {
    for refined in [false, true] {
        for c in [vec![1, 1], vec![2, 3]] {
            let bounds = ClockBounds::new(c.clone()).unwrap();
            for r in enumerate_regions(&bounds, &opts(refined), &Rational::from_ratio(1, 32)) {
                let v: ClockValuation<Rational> = representative(&r, &bounds).unwrap();
                assert_eq!(region_of(&v, &bounds, &opts(refined)), r);
                for (_, x) in v.iter() {
                    assert!((x.clone() * Rational::from_int(16)).is_integral(), "{r}: {v}");
                }
            }
        }
    }
}

#[test]
fn count_bound_formula() {
    // prod 2(c + 1), times n!, 2^(n-1) and (n+1)^(2n), written out by hand.
    let cases: [(&[u32], u64); 4] = [
        (&[1, 1], 16 * 2 * 2 * 9 * 9),
        (&[1], 4 * 2 * 2),
        (&[7, 11], 384 * 2 * 2 * 81),
        (&[1, 1, 1], 64 * 6 * 4 * 4096),
    ];
    for (c, expected) in cases {
        let bounds = ClockBounds::new(c.to_vec()).unwrap();
        assert_eq!(region_count_bound(&bounds, c.len()), expected.into(), "c={c:?}");
    }
    assert!(grid_signatures(&[1, 1], 16, false).len() as u64 <= 5184);
    assert!(grid_signatures(&[1], 16, false).len() as u64 <= 16);
}

#[test]
fn refinement_only_splits_classes() {
    for c in [vec![1], vec![1, 1], vec![2, 2]] {
        let coarse = grid_signatures(&c, 8, false).len();
        let fine = grid_signatures(&c, 8, true).len();
        assert!(fine >= coarse, "c={c:?}");
    }
}

#[test]
fn worked_examples() {
    let b2 = ClockBounds::new(vec![2, 2]).unwrap();
    let b3 = ClockBounds::new(vec![2, 2, 2]).unwrap();
    let b11 = ClockBounds::new(vec![1, 1]).unwrap();
    let o = opts(false);
    let v = |pairs: &[(i64, i64)]| ClockValuation::<Rational>::from_ratios(pairs);

    assert!(equivalent(&v(&[(2, 5), (2, 5), (4, 5)]), &v(&[(1, 10), (1, 10), (19, 20)]), &b3, &o));
    assert!(!equivalent(&v(&[(3, 10), (2, 5)]), &v(&[(3, 10), (4, 5)]), &b11, &o));
    assert_eq!(region_of(&v(&[(2, 5), (4, 5)]), &b2, &o), region_of(&v(&[(1, 10), (19, 20)]), &b2, &o));

    let r = region_of(&v(&[(5, 2), (1, 2)]), &b2, &o);
    assert_eq!(r.alpha[0], Interval::Above);
    assert_eq!(r.alpha[1], Interval::Open(0));
    assert_eq!((r.beta[0], r.zeta[0], r.eta[0]), (None, None, None));
    assert_eq!(r.beta[1], Some(1));

    let zero = region_of(&v(&[(0, 1), (0, 1)]), &b2, &o);
    assert_eq!(zero.alpha, vec![Interval::Point(0), Interval::Point(0)]);
    assert_eq!(zero.gamma, vec![true]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn two_clocks(den in prop::sample::select(vec![2i64, 4, 5, 10]), refined: bool,
                  a in proptest::collection::vec(0i64..40, 2), b in proptest::collection::vec(0i64..40, 2)) {
        let c = [2u32, 3];
        let bounds = ClockBounds::new(c.to_vec()).unwrap();
        let a: Vec<i64> = a.iter().zip(&c).map(|(k, &c)| k % ((i64::from(c) + 1) * den + 1)).collect();
        let b: Vec<i64> = b.iter().zip(&c).map(|(k, &c)| k % ((i64::from(c) + 1) * den + 1)).collect();
        let same = signature(&a, den, &c, refined) == signature(&b, den, &c, refined);
        let (va, vb) = (valuation(&a, den), valuation(&b, den));
        prop_assert_eq!(equivalent(&va, &vb, &bounds, &opts(refined)), same);
        prop_assert_eq!(region_of(&va, &bounds, &opts(refined)) == region_of(&vb, &bounds, &opts(refined)), same);
    }

    #[test]
    fn three_clocks(den in prop::sample::select(vec![2i64, 3, 4]),
                    a in proptest::collection::vec(0i64..9, 3), b in proptest::collection::vec(0i64..9, 3)) {
        let c = [1u32, 1, 2];
        let bounds = ClockBounds::new(c.to_vec()).unwrap();
        let same = signature(&a, den, &c, false) == signature(&b, den, &c, false);
        let (va, vb) = (valuation(&a, den), valuation(&b, den));
        prop_assert_eq!(equivalent(&va, &vb, &bounds, &opts(false)), same);
        prop_assert_eq!(region_of(&va, &bounds, &opts(false)) == region_of(&vb, &bounds, &opts(false)), same);
    }
}
