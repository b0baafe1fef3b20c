mod common;

use common::*;
use hyperstrata::comb::{
    binomial, compositions_from_length, enumerate_compositions, enumerate_partitions, leq_composition, leq_partition,
    quotient, Composition, Partition,
};
use proptest::prelude::*;

fn all_compositions(n: u32) -> Vec<Composition> {
    compositions_from_length(n, 1).unwrap()
}

#[test]
fn composition_counts_are_binomial() {
    for n in 1..=12u32 {
        for l in 1..=n {
            let got = enumerate_compositions(n, l).unwrap();
            assert_eq!(got.len() as u64, binomial(n as i64 - 1, l as i64 - 1), "n={n} l={l}");
            assert!(got.windows(2).all(|w| w[0] < w[1]), "sorted output");
        }
    }
}

#[test]
fn prefix_sums_are_an_order_isomorphism() {
    for n in 1..=8 {
        let all = all_compositions(n);
        let masks: std::collections::BTreeSet<u64> = all.iter().map(Composition::prefix_mask).collect();
        assert_eq!(masks.len(), all.len(), "injective for n={n}");
        for mu in &all {
            for lambda in &all {
                let by_sets = mu.prefix_sums().is_subset(&lambda.prefix_sums());
                assert_eq!(leq_composition(mu, lambda).unwrap(), by_sets);
            }
        }
    }
}

#[test]
fn quotient_matches_run_lengths_and_is_transitive() {
    for n in 1..=8 {
        let all = all_compositions(n);
        let leq = |a: &Composition, b: &Composition| leq_composition(a, b).unwrap();
        for lambda in &all {
            for gamma in all.iter().filter(|g| leq(lambda, g)) {
                let q = quotient(lambda, gamma).unwrap();
                assert_eq!(Some(q.parts().to_vec()), quotient_oracle(lambda, gamma));
                for mu in all.iter().filter(|m| leq(gamma, m)) {
                    let lm = quotient(lambda, mu).unwrap();
                    let gm = quotient(gamma, mu).unwrap();
                    assert_eq!(quotient(&lm, &gm).unwrap(), q, "{lambda} <= {gamma} <= {mu}");
                }
            }
            // the quotient map by a fixed fine composition reflects the order
            for mu in all.iter().filter(|m| leq(lambda, m)) {
                let lm = quotient(lambda, mu).unwrap();
                for gamma in all.iter().filter(|g| leq(g, mu)) {
                    let gm = quotient(gamma, mu).unwrap();
                    assert_eq!(leq(&lm, &gm), leq(lambda, gamma));
                }
            }
        }
    }
}

#[test]
fn alternate_patterns_match_positions_and_swap_under_reversal() {
    for n in 1..=10 {
        for comp in all_compositions(n) {
            let (odd, even) = (comp.is_alternate_odd(), comp.is_alternate_even());
            assert_eq!(odd, alternate_odd_oracle(&comp), "{comp}");
            assert_eq!(even, alternate_even_oracle(&comp), "{comp}");
            let rev = comp.reversed();
            if comp.parts().iter().all(|&x| x == 1) {
                assert!(odd && even);
            }
            if comp.len() % 2 == 0 {
                // reversal maps positions l, l-2, …, 2 onto 1, 3, …, l-1
                assert_eq!((rev.is_alternate_odd(), rev.is_alternate_even()), (even, odd), "{comp}");
            } else {
                // both position sets are reversal-symmetric
                assert_eq!((rev.is_alternate_odd(), rev.is_alternate_even()), (odd, even), "{comp}");
            }
        }
    }
}

#[test]
fn leq_partition_matches_set_partition_oracle() {
    for n in 1..=9 {
        let all: Vec<Partition> = (1..=n).flat_map(|l| enumerate_partitions(n, l).unwrap()).collect();
        for coarse in &all {
            for fine in &all {
                let got = leq_partition(coarse, fine).unwrap();
                assert_eq!(got, partition_refines_oracle(coarse, fine), "{coarse} vs {fine}");
                if got && coarse.len() == fine.len() {
                    assert_eq!(coarse, fine);
                }
            }
        }
    }
}

fn composition_strategy() -> impl Strategy<Value = Composition> {
    prop::collection::vec(1u32..5, 1..8).prop_map(|parts| Composition::new(parts).unwrap())
}

proptest! {
    #[test]
    fn reversal_is_an_involution_and_preserves_the_partition(comp in composition_strategy()) {
        prop_assert_eq!(comp.reversed().reversed(), comp.clone());
        prop_assert_eq!(comp.reversed().to_partition(), comp.to_partition());
    }

    #[test]
    fn upper_covers_split_one_part(comp in composition_strategy()) {
        for up in comp.upper_covers() {
            prop_assert_eq!(up.len(), comp.len() + 1);
            prop_assert!(leq_composition(&comp, &up).unwrap());
        }
        let splittable: u32 = comp.parts().iter().map(|&x| x - 1).sum();
        prop_assert_eq!(comp.upper_covers().len() as u32, splittable);
    }
}
