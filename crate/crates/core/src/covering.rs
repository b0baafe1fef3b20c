//! Potential-poset enumeration and Vandermonde-covering search.
//!
//! The enumeration is a depth-first include/exclude search over `C(n, s)` in lexicographic
//! order. For every element `λ` above the decided facets it tracks how many chosen facets
//! have an alternate-odd (resp. even) quotient and how many undecided facets still could.
//! A branch dies as soon as some covered `λ` has two odd (or two even) facets, or can no
//! longer get one, so every leaf that survives is a potential poset.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{covering_lower_recursive, covering_upper_bound, f0_bound};
use crate::comb::{
    compositions_from_length, enumerate_compositions, enumerate_partitions, leq_partition, quotient_unchecked,
    Composition, Parity, Partition,
};
use crate::error::{Error, Result};
use crate::poset::build_poset;

/// Largest `n` enumerated without `force`.
pub const DEFAULT_MAX_N: u32 = 9;

/// Facet sets are stored sorted; a family is sorted lexicographically.
pub type FacetSet = Vec<Composition>;

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerateOptions {
    pub up_to_reversal: bool,
    /// Worker threads; `0` uses the global pool.
    pub jobs: usize,
    /// Skip the scale guard.
    pub force: bool,
}

/// Elementwise reversal, re-sorted.
pub fn reverse_set(set: &[Composition]) -> FacetSet {
    let mut out: FacetSet = set.iter().map(Composition::reversed).collect();
    out.sort();
    out
}

/// Representative of `{S, reverse(S)}`: the lexicographically smaller sorted list.
pub fn canonical_under_reversal(set: &[Composition]) -> FacetSet {
    let mut own = set.to_vec();
    own.sort();
    let rev = reverse_set(set);
    own.min(rev)
}

struct Precomputed {
    facets: Vec<Composition>,
    /// For each facet, `(λ index, odd, even)` over the elements `λ > μ`.
    above: Vec<Vec<(usize, bool, bool)>>,
    lambdas: usize,
    min_size: usize,
    max_size: usize,
}

#[derive(Clone)]
struct State {
    odd: Vec<u8>,
    even: Vec<u8>,
    any: Vec<u8>,
    rem_odd: Vec<u8>,
    rem_even: Vec<u8>,
    chosen: Vec<usize>,
}

impl Precomputed {
    fn new(n: u32, s: u32) -> Result<Self> {
        let facets = enumerate_compositions(n, s)?;
        let lambdas = if s < n { compositions_from_length(n, s + 1)? } else { Vec::new() };
        let above = facets
            .iter()
            .map(|mu| {
                lambdas
                    .iter()
                    .enumerate()
                    .filter(|(_, lam)| mu.prefix_mask() & !lam.prefix_mask() == 0)
                    .map(|(i, lam)| {
                        let p = Parity::of(&quotient_unchecked(mu.prefix_mask(), lam.prefix_mask(), mu.len()));
                        (i, p.odd, p.even)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            facets,
            above,
            lambdas: lambdas.len(),
            min_size: (n - s + 1) as usize,
            max_size: f0_bound(n, s)? as usize,
        })
    }

    fn initial_state(&self) -> State {
        let mut st = State {
            odd: vec![0; self.lambdas],
            even: vec![0; self.lambdas],
            any: vec![0; self.lambdas],
            rem_odd: vec![0; self.lambdas],
            rem_even: vec![0; self.lambdas],
            chosen: Vec::new(),
        };
        for list in &self.above {
            for &(l, odd, even) in list {
                st.rem_odd[l] += u8::from(odd);
                st.rem_even[l] += u8::from(even);
            }
        }
        st
    }

    fn decide(&self, k: usize, st: &mut State) {
        for &(l, odd, even) in &self.above[k] {
            st.rem_odd[l] -= u8::from(odd);
            st.rem_even[l] -= u8::from(even);
        }
    }

    fn undecide(&self, k: usize, st: &mut State) {
        for &(l, odd, even) in &self.above[k] {
            st.rem_odd[l] += u8::from(odd);
            st.rem_even[l] += u8::from(even);
        }
    }

    /// Adds facet `k`; returns whether the state stays viable.
    fn include(&self, k: usize, st: &mut State) -> bool {
        let mut ok = true;
        for &(l, odd, even) in &self.above[k] {
            st.any[l] += 1;
            st.odd[l] += u8::from(odd);
            st.even[l] += u8::from(even);
            ok &= st.odd[l] <= 1 && st.even[l] <= 1 && st.odd[l] + st.rem_odd[l] >= 1 && st.even[l] + st.rem_even[l] >= 1;
        }
        st.chosen.push(k);
        ok
    }

    fn exclude_include(&self, k: usize, st: &mut State) {
        for &(l, odd, even) in &self.above[k] {
            st.any[l] -= 1;
            st.odd[l] -= u8::from(odd);
            st.even[l] -= u8::from(even);
        }
        st.chosen.pop();
    }

    /// Viability after deciding facet `k` without adding it.
    fn exclude_ok(&self, k: usize, st: &State) -> bool {
        self.above[k]
            .iter()
            .all(|&(l, _, _)| st.any[l] == 0 || (st.odd[l] + st.rem_odd[l] >= 1 && st.even[l] + st.rem_even[l] >= 1))
    }

    fn dfs(&self, k: usize, st: &mut State, out: &mut Vec<Vec<usize>>) {
        if st.chosen.len() + (self.facets.len() - k) < self.min_size {
            return;
        }
        if k == self.facets.len() {
            out.push(st.chosen.clone());
            return;
        }
        self.decide(k, st);
        if st.chosen.len() < self.max_size {
            if self.include(k, st) {
                self.dfs(k + 1, st, out);
            }
            self.exclude_include(k, st);
        }
        if self.exclude_ok(k, st) {
            self.dfs(k + 1, st, out);
        }
        self.undecide(k, st);
    }

    /// Same search, forking the first `split` levels across the rayon pool.
    fn dfs_par(&self, k: usize, split: usize, mut st: State) -> Vec<Vec<usize>> {
        if k >= split || k == self.facets.len() {
            let mut out = Vec::new();
            self.dfs(k, &mut st, &mut out);
            return out;
        }
        if st.chosen.len() + (self.facets.len() - k) < self.min_size {
            return Vec::new();
        }
        self.decide(k, &mut st);
        let mut with = st.clone();
        let include_ok = with.chosen.len() < self.max_size && self.include(k, &mut with);
        let exclude_ok = self.exclude_ok(k, &st);
        let (mut a, b) = rayon::join(
            || if include_ok { self.dfs_par(k + 1, split, with) } else { Vec::new() },
            || if exclude_ok { self.dfs_par(k + 1, split, st) } else { Vec::new() },
        );
        a.extend(b);
        a
    }
}

/// Refuses sizes beyond [`DEFAULT_MAX_N`] unless forced.
pub fn scale_guard(n: u32, s: u32, force: bool) -> Result<()> {
    if s < 1 || s > n {
        return Err(Error::domain(format!("need 1 <= s <= n, got n = {n}, s = {s}")));
    }
    if n > DEFAULT_MAX_N && !force {
        let facets = crate::comb::binomial(i64::from(n) - 1, i64::from(s) - 1);
        return Err(Error::domain(format!(
            "(n, s) = ({n}, {s}) has {facets} candidate facets (2^{facets} subsets); \
             beyond the default limit n <= {DEFAULT_MAX_N}, pass --force to run anyway"
        )));
    }
    Ok(())
}

/// All facet sets `S ⊆ C(n, s)` whose poset is potential, sorted.
pub fn enumerate_potential_with(n: u32, s: u32, opts: EnumerateOptions) -> Result<Vec<FacetSet>> {
    scale_guard(n, s, opts.force)?;
    let pre = Precomputed::new(n, s)?;
    let split = pre.facets.len().min(12);
    let run = || pre.dfs_par(0, split, pre.initial_state());
    let raw = if opts.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::domain(format!("cannot start {} workers: {e}", opts.jobs)))?;
        pool.install(run)
    } else {
        run()
    };
    let mut family: Vec<FacetSet> =
        raw.into_iter().map(|idx| idx.into_iter().map(|i| pre.facets[i].clone()).collect()).collect();
    if opts.up_to_reversal {
        let canon: BTreeSet<FacetSet> = family.iter().map(|s| canonical_under_reversal(s)).collect();
        family = canon.into_iter().collect();
    }
    family.sort();
    Ok(family)
}

pub fn enumerate_potential(n: u32, s: u32, up_to_reversal: bool) -> Result<Vec<FacetSet>> {
    enumerate_potential_with(n, s, EnumerateOptions { up_to_reversal, ..Default::default() })
}

/// `(q, λ)` with `sorted(λ) ≤ q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub partition: Partition,
    pub lambda: Composition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringCheck {
    pub covered: bool,
    /// One entry per family member; `None` marks an uncovered set.
    pub witnesses: Vec<Option<Witness>>,
}

fn validate_partitions(partitions: &[Partition], n: u32, s: u32) -> Result<()> {
    for q in partitions {
        if q.n() != n || q.len() != s as usize {
            return Err(Error::domain(format!("{q} is not a partition of {n} into {s} parts")));
        }
    }
    Ok(())
}

/// Checks that every facet set has an element `λ` of its poset (other than the formal
/// bottom) and a `q` in `partitions` with `sorted(λ) ≤ q`.
pub fn is_covering(partitions: &[Partition], family: &[FacetSet]) -> Result<CoveringCheck> {
    let mut witnesses = Vec::with_capacity(family.len());
    for set in family {
        let first = set.first().ok_or_else(|| Error::domain("empty facet set in family"))?;
        let (n, s) = (first.n(), first.len() as u32);
        validate_partitions(partitions, n, s)?;
        let poset = build_poset(set, n, s)?;
        let longest = partitions.iter().map(Partition::len).max().unwrap_or(0);
        let mut found = None;
        // sorted(λ) ≤ q forces ℓ(λ) ≤ ℓ(q)
        'search: for lambda in poset.elements().take_while(|l| l.len() <= longest) {
            let sorted = lambda.to_partition();
            for q in partitions {
                if leq_partition(&sorted, q)? {
                    found = Some(Witness { partition: q.clone(), lambda: lambda.clone() });
                    break 'search;
                }
            }
        }
        witnesses.push(found);
    }
    Ok(CoveringCheck { covered: witnesses.iter().all(Option::is_some), witnesses })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMethod {
    Exact,
    Greedy,
}

impl std::str::FromStr for CoverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CoverMethod::Exact),
            "greedy" => Ok(CoverMethod::Greedy),
            other => Err(Error::Parse(format!("unknown method `{other}` (exact|greedy)"))),
        }
    }
}

pub const POTENTIAL_CAVEAT: &str =
    "minimal over the potential family; realizable slices may admit smaller covers only if some potential poset is not realizable";

/// A covering problem and its solution.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringInstance {
    pub schema: &'static str,
    pub n: u32,
    pub s: u32,
    pub family_size: usize,
    pub candidates: Vec<Partition>,
    pub method: CoverMethod,
    pub solution: Vec<Partition>,
    pub size: usize,
    /// True when the size is proven minimal over the family.
    pub optimal: bool,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub caveat: &'static str,
}

/// Candidate masks per facet set: bit `i` set when candidate `i` covers the set.
fn coverage_masks(candidates: &[Partition], family: &[FacetSet]) -> Vec<u64> {
    family
        .iter()
        .map(|set| {
            let sorted: BTreeSet<Partition> = set.iter().map(Composition::to_partition).collect();
            candidates.iter().enumerate().filter(|(_, q)| sorted.contains(q)).fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect()
}

fn greedy_cover(masks: &[u64], ncand: usize) -> Option<u64> {
    let mut uncovered: Vec<u64> = masks.to_vec();
    let mut chosen = 0u64;
    while !uncovered.is_empty() {
        let best = (0..ncand)
            .map(|c| (uncovered.iter().filter(|&&m| m >> c & 1 == 1).count(), c))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))?;
        if best.0 == 0 {
            return None;
        }
        chosen |= 1 << best.1;
        uncovered.retain(|&m| m >> best.1 & 1 == 0);
    }
    Some(chosen)
}

/// Number of pairwise disjoint masks found greedily; each needs its own candidate.
fn packing_bound(masks: &[u64]) -> usize {
    let mut used = 0u64;
    let mut count = 0;
    let mut sorted: Vec<u64> = masks.to_vec();
    sorted.sort_by_key(|m| m.count_ones());
    for m in sorted {
        if m & used == 0 {
            used |= m;
            count += 1;
        }
    }
    count
}

fn branch_and_bound(uncovered: &[u64], chosen: u64, best: &mut u64) {
    if uncovered.is_empty() {
        if chosen.count_ones() < best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if chosen.count_ones() as usize + packing_bound(uncovered) >= best.count_ones() as usize {
        return;
    }
    let pivot = *uncovered.iter().min_by_key(|m| m.count_ones()).expect("nonempty");
    let mut bits = pivot;
    while bits != 0 {
        let c = bits.trailing_zeros();
        bits &= bits - 1;
        let rest: Vec<u64> = uncovered.iter().copied().filter(|m| m >> c & 1 == 0).collect();
        branch_and_bound(&rest, chosen | 1 << c, best);
    }
}

/// Smallest (exact) or greedy set of partitions covering every facet set in `family`.
pub fn min_cover(family: &[FacetSet], n: u32, s: u32, method: CoverMethod) -> Result<CoveringInstance> {
    if family.is_empty() {
        return Err(Error::domain("empty family"));
    }
    let candidates = enumerate_partitions(n, s)?;
    if candidates.len() > 64 {
        return Err(Error::domain(format!("{} candidate partitions exceed the supported 64", candidates.len())));
    }
    let masks: Vec<u64> = coverage_masks(&candidates, family).into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if masks.contains(&0) {
        return Err(Error::structural("some facet set cannot be covered by any partition"));
    }
    let greedy = greedy_cover(&masks, candidates.len()).expect("every mask is nonzero");
    let (chosen, optimal) = match method {
        CoverMethod::Greedy => (greedy, false),
        CoverMethod::Exact => {
            let mut best = greedy;
            branch_and_bound(&masks, 0, &mut best);
            (best, true)
        }
    };
    let solution: Vec<Partition> =
        candidates.iter().enumerate().filter(|(i, _)| chosen >> i & 1 == 1).map(|(_, q)| q.clone()).collect();
    let (lower_bound, upper_bound) = if s >= 2 {
        (covering_lower_recursive(n, s)?.0, covering_upper_bound(n, s)?)
    } else {
        (1, 1)
    };
    Ok(CoveringInstance {
        schema: crate::SCHEMA_VERSION,
        n,
        s,
        family_size: family.len(),
        candidates,
        method,
        size: solution.len(),
        solution,
        optimal,
        lower_bound,
        upper_bound,
        caveat: POTENTIAL_CAVEAT,
    })
}

/// Whether `{(2,2,1,…,1)}` covers every potential `(n, n-2)` poset.
pub fn known_cover_check(n: u32) -> Result<bool> {
    if n < 4 {
        return Err(Error::domain(format!("need n >= 4, got {n}")));
    }
    let family = enumerate_potential(n, n - 2, false)?;
    let mut parts = vec![2, 2];
    parts.resize(n as usize - 2, 1);
    Ok(is_covering(&[Partition::new(parts)?], &family)?.covered)
}

/// JSON document for an enumerated family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub schema: &'static str,
    pub n: u32,
    pub s: u32,
    pub up_to_reversal: bool,
    pub count: usize,
    pub family: Vec<FacetSet>,
}

impl FamilyReport {
    pub fn new(n: u32, s: u32, up_to_reversal: bool, family: Vec<FacetSet>) -> Self {
        Self { schema: crate::SCHEMA_VERSION, n, s, up_to_reversal, count: family.len(), family }
    }
}

/// Parallel map over a family with order-preserving output.
pub fn par_map_family<T: Send>(family: &[FacetSet], f: impl Fn(&FacetSet) -> T + Sync + Send) -> Vec<T> {
    family.par_iter().map(f).collect()
}
