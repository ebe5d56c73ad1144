use std::collections::HashMap;

use proptest::prelude::*;
use retri_core::ternary::{
    balanced_ternary_digits, binary_digits, centered_pair_offset, digits_to_offset, peers,
    peers_with_radix, ucr, BalancedDigits, CenteredOffset, Radix, Trit,
};

/// Every vector in {-1,0,+1}^s, by odometer enumeration.
fn all_digit_vectors(s: usize) -> Vec<Vec<Trit>> {
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|v| {
                Trit::ALL.iter().map(move |&t| {
                    let mut w = v.clone();
                    w.push(t);
                    w
                })
            })
            .collect();
    }
    out
}

fn value_by_enumeration(v: &[Trit]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(k, t)| t.value() * 3i64.pow(k as u32))
        .sum()
}

#[test]
fn negative_four_matches_enumeration_oracle() {
    let hits: Vec<_> = all_digit_vectors(2)
        .into_iter()
        .filter(|v| value_by_enumeration(v) == -4)
        .collect();
    assert_eq!(hits, vec![vec![Trit::Neg, Trit::Neg]]);
    assert_eq!(
        balanced_ternary_digits(CenteredOffset(-4), 2).unwrap().0,
        hits[0]
    );
}

#[test]
fn digit_map_is_a_bijection_up_to_seven_digits() {
    for s in 0..=7 {
        let half = (3i64.pow(s as u32) - 1) / 2;
        let mut seen: HashMap<i64, Vec<Trit>> = HashMap::new();
        for v in all_digit_vectors(s) {
            let value = digits_to_offset(&BalancedDigits(v.clone()));
            assert_eq!(value, value_by_enumeration(&v));
            assert!((-half..=half).contains(&value));
            assert!(seen.insert(value, v).is_none(), "duplicate value {value} at s={s}");
        }
        assert_eq!(seen.len(), 3usize.pow(s as u32));
        for (value, v) in seen {
            assert_eq!(balanced_ternary_digits(CenteredOffset(value), s).unwrap().0, v);
        }
    }
}

#[test]
fn ucr_is_congruent_and_centered() {
    for n in (1..=243).step_by(2) {
        let half = (n as i64 - 1) / 2;
        for x in 0..n as i64 {
            let c = ucr(x, n).unwrap().value();
            assert_eq!((c - x).rem_euclid(n as i64), 0);
            assert!((-half..=half).contains(&c));
        }
    }
}

#[test]
fn peer_symmetry() {
    for (n, radix) in [(27, Radix::Ternary), (243, Radix::Ternary), (64, Radix::Binary)] {
        for k in 0..radix.phases_for(n) {
            for u in 0..n {
                let (_, right) = peers_with_radix(u, k, n, radix);
                assert_eq!(peers_with_radix(right, k, n, radix).0, u);
            }
        }
    }
    for u in 0..81 {
        for k in 0..4 {
            let (left, right) = peers(u, k, 81);
            assert_eq!(peers(left, k, 81).1, u);
            assert_eq!(peers(right, k, 81).0, u);
        }
    }
}

#[test]
fn binary_digits_reconstruct_offset() {
    for s in 0..=6 {
        for offset in 0..1usize << s {
            let bits = binary_digits(offset, s).unwrap();
            assert_eq!(bits.prefix_offset(s), offset);
        }
    }
}

proptest! {
    #[test]
    fn digits_round_trip(raw in prop::collection::vec(0usize..3, 0..=12)) {
        let v: Vec<Trit> = raw.iter().map(|&i| Trit::ALL[i]).collect();
        let digits = BalancedDigits(v);
        let value = digits_to_offset(&digits);
        prop_assert_eq!(balanced_ternary_digits(CenteredOffset(value), digits.len()).unwrap(), digits);
    }

    #[test]
    fn offset_round_trip(s in 1usize..=12, seed in any::<u64>()) {
        let n = 3usize.pow(s as u32);
        let (r, d) = ((seed % n as u64) as usize, ((seed >> 32) % n as u64) as usize);
        let delta = centered_pair_offset(r, d, n).unwrap();
        let digits = balanced_ternary_digits(delta, s).unwrap();
        prop_assert_eq!(digits_to_offset(&digits), delta.value());
        let landed = (r as i64 + delta.value()).rem_euclid(n as i64) as usize;
        prop_assert_eq!(landed, d);
    }
}
