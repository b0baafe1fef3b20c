//! Slow, independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hyperstrata::comb::{enumerate_compositions, Composition, Partition};
use hyperstrata::poset::is_potential;

pub fn c(parts: &[u32]) -> Composition {
    Composition::new(parts.to_vec()).unwrap()
}

pub fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

/// Every subset of `C(n, s)` run through `is_potential`, in the library's output order.
pub fn naive_potential_family(n: u32, s: u32) -> Vec<Vec<Composition>> {
    let all = enumerate_compositions(n, s).unwrap();
    assert!(all.len() <= 20, "naive oracle is exponential");
    let mut out = Vec::new();
    for mask in 1u32..(1 << all.len()) {
        let set: Vec<Composition> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        if is_potential(&set, n, s).unwrap().0 {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Refinement by grouping: some set partition of `fine`'s parts into `ℓ(coarse)` blocks
/// has block sums equal to `coarse` as a multiset.
pub fn partition_refines_oracle(coarse: &Partition, fine: &Partition) -> bool {
    let k = coarse.len();
    let parts = fine.parts();
    if coarse.n() != fine.n() || k > parts.len() {
        return false;
    }
    let mut want: Vec<u32> = coarse.parts().to_vec();
    want.sort_unstable();
    // restricted-growth strings enumerate set partitions without repetition
    fn rec(i: usize, parts: &[u32], sums: &mut Vec<u32>, k: usize, want: &[u32]) -> bool {
        if i == parts.len() {
            if sums.len() != k {
                return false;
            }
            let mut got = sums.clone();
            got.sort_unstable();
            return got == want;
        }
        for b in 0..sums.len() {
            sums[b] += parts[i];
            if rec(i + 1, parts, sums, k, want) {
                return true;
            }
            sums[b] -= parts[i];
        }
        if sums.len() < k {
            sums.push(parts[i]);
            if rec(i + 1, parts, sums, k, want) {
                return true;
            }
            sums.pop();
        }
        false
    }
    rec(0, parts, &mut Vec::new(), k, &want)
}

/// Compositions of length `l` whose parts at positions `l, l-2, …` (1-based) equal 1.
pub fn alternate_odd_oracle(c: &Composition) -> bool {
    let parts = c.parts();
    let l = parts.len();
    (0..l).rev().step_by(2).all(|i| parts[i] == 1)
}

/// Parts at positions `l-1, l-3, …` equal 1.
pub fn alternate_even_oracle(c: &Composition) -> bool {
    let parts = c.parts();
    let l = parts.len();
    l < 2 || (0..l - 1).rev().step_by(2).all(|i| parts[i] == 1)
}

/// Coarsening `fine` by the cut points of `coarse`: each part of `coarse` is a run of
/// consecutive parts of `fine`; the quotient lists the run lengths.
pub fn quotient_oracle(coarse: &Composition, fine: &Composition) -> Option<Vec<u32>> {
    let mut out = Vec::new();
    let mut it = fine.parts().iter();
    for &target in coarse.parts() {
        let (mut sum, mut count) = (0, 0);
        while sum < target {
            sum += *it.next()?;
            count += 1;
        }
        if sum != target {
            return None;
        }
        out.push(count);
    }
    Some(out)
}

/// A weaker reading of the potential-poset axioms: exactly one alternate-odd and one
/// alternate-even facet, and every length-`(s+1)` element dominates zero or two facets.
pub fn relaxed_family(n: u32, s: u32) -> Vec<Vec<Composition>> {
    let all = enumerate_compositions(n, s).unwrap();
    let ridges = enumerate_compositions(n, s + 1).unwrap();
    let mut out = Vec::new();
    for mask in 1u32..(1 << all.len()) {
        let set: Vec<Composition> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        if set.iter().filter(|c| alternate_odd_oracle(c)).count() != 1
            || set.iter().filter(|c| alternate_even_oracle(c)).count() != 1
        {
            continue;
        }
        let ok = ridges.iter().all(|r| {
            let k = set.iter().filter(|f| r.prefix_sums().is_superset(&f.prefix_sums())).count();
            k == 0 || k == 2
        });
        if ok {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Canonical representative of `set` and its reversal: the lexicographically smaller
/// sorted list.
pub fn reversal_class(set: &[Composition]) -> Vec<Composition> {
    let mut own: Vec<Composition> = set.to_vec();
    own.sort();
    let mut rev: Vec<Composition> = set.iter().map(Composition::reversed).collect();
    rev.sort();
    own.min(rev)
}

pub fn classes(family: &[Vec<Composition>]) -> BTreeSet<Vec<Composition>> {
    family.iter().map(|s| reversal_class(s)).collect()
}
