//! Compositions, partitions and the orders between them.
//!
//! A composition of `n` is stored together with its prefix-sum set (as a bitmask
//! over `1..=n`), so that the refinement order reduces to a subset test. `n` is
//! therefore capped at [`MAX_N`].

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `n`; prefix sets live in a `u64`.
pub const MAX_N: u32 = 64;

/// Ordered positive parts summing to `n`.
#[derive(Clone, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Composition {
    parts: Vec<u32>,
    n: u32,
    prefix: u64,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("a composition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::domain(format!("zero part in composition {parts:?}")));
        }
        let n: u64 = parts.iter().map(|&p| u64::from(p)).sum();
        if n > u64::from(MAX_N) {
            return Err(Error::domain(format!("n = {n} exceeds the supported maximum {MAX_N}")));
        }
        let mut prefix = 0u64;
        let mut acc = 0u32;
        for &p in &parts {
            acc += p;
            prefix |= 1u64 << (acc - 1);
        }
        Ok(Self { parts, n: n as u32, prefix })
    }

    /// The all-ones composition of `n`.
    pub fn ones(n: u32) -> Result<Self> {
        Self::new(vec![1; n as usize])
    }

    /// Rebuilds a composition of `n` from its prefix-sum bitmask (bit `k-1` set for sum `k`).
    pub fn from_prefix_mask(n: u32, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_N || mask >> (n - 1) & 1 == 0 || (n < 64 && mask >> n != 0) {
            return Err(Error::domain(format!("mask {mask:#x} is not a prefix set of {n}")));
        }
        let mut parts = Vec::new();
        let mut last = 0;
        for k in 1..=n {
            if mask >> (k - 1) & 1 == 1 {
                parts.push(k - last);
                last = k;
            }
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Prefix sums excluding 0 as a bitmask; always contains `n`.
    pub fn prefix_mask(&self) -> u64 {
        self.prefix
    }

    pub fn prefix_sums(&self) -> BTreeSet<u32> {
        (1..=self.n).filter(|k| self.prefix >> (k - 1) & 1 == 1).collect()
    }

    pub fn reversed(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.reverse();
        Self::new(parts).expect("reversal keeps validity")
    }

    /// Parts `μ_l, μ_{l-2}, …` are all 1.
    pub fn is_alternate_odd(&self) -> bool {
        self.parts.iter().rev().step_by(2).all(|&p| p == 1)
    }

    /// Parts `μ_{l-1}, μ_{l-3}, …` are all 1.
    pub fn is_alternate_even(&self) -> bool {
        self.parts.iter().rev().skip(1).step_by(2).all(|&p| p == 1)
    }

    /// All compositions obtained by splitting a single part in two.
    pub fn upper_covers(&self) -> Vec<Composition> {
        let mut out = Vec::new();
        for (i, &p) in self.parts.iter().enumerate() {
            for a in 1..p {
                let mut parts = Vec::with_capacity(self.len() + 1);
                parts.extend_from_slice(&self.parts[..i]);
                parts.push(a);
                parts.push(p - a);
                parts.extend_from_slice(&self.parts[i + 1..]);
                out.push(Composition::new(parts).expect("split keeps validity"));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Sorted (weakly decreasing) image.
    pub fn to_partition(&self) -> Partition {
        Partition::from_parts_unsorted(self.parts.clone()).expect("same parts")
    }
}

impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// `n` and `prefix` are functions of `parts`; equality and hashing use `parts` alone
impl PartialEq for Composition {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl std::hash::Hash for Composition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.parts.hash(state);
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Composition> for Vec<u32> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.parts)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, parts: &[u32]) -> fmt::Result {
    f.write_str("(")?;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str(")")
}

/// Weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
    n: u32,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::domain(format!("invalid partition {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain(format!("partition parts must be weakly decreasing: {parts:?}")));
        }
        let n: u64 = parts.iter().map(|&p| u64::from(p)).sum();
        if n > u64::from(MAX_N) {
            return Err(Error::domain(format!("n = {n} exceeds the supported maximum {MAX_N}")));
        }
        Ok(Self { parts, n: n as u32 })
    }

    pub fn from_parts_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    /// Parses `"2,2,1,1"` (parentheses and spaces tolerated).
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !matches!(c, '(' | ')' | '[' | ']' | ' ')).collect();
        let parts = cleaned
            .split(',')
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("bad partition `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::from_parts_unsorted(parts)
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.parts)
    }
}

fn check_nl(n: u32, l: u32) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::domain(format!("need 1 <= l <= n, got n = {n}, l = {l}")));
    }
    if n > MAX_N {
        return Err(Error::domain(format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(())
}

/// All compositions of `n` into exactly `l` parts, lexicographically increasing.
pub fn enumerate_compositions(n: u32, l: u32) -> Result<Vec<Composition>> {
    check_nl(n, l)?;
    fn rec(rest: u32, slots: u32, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(rest);
            out.push(Composition::new(cur.clone()).expect("valid by construction"));
            cur.pop();
            return;
        }
        for first in 1..=rest - (slots - 1) {
            cur.push(first);
            rec(rest - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, l, &mut Vec::with_capacity(l as usize), &mut out);
    Ok(out)
}

/// Every composition of `n` with length in `min_len..=n`, grouped by increasing length.
pub fn compositions_from_length(n: u32, min_len: u32) -> Result<Vec<Composition>> {
    let mut out = Vec::new();
    for l in min_len.max(1)..=n {
        out.extend(enumerate_compositions(n, l)?);
    }
    Ok(out)
}

/// All partitions of `n` into exactly `l` parts, lexicographically decreasing.
pub fn enumerate_partitions(n: u32, l: u32) -> Result<Vec<Partition>> {
    check_nl(n, l)?;
    fn rec(rest: u32, slots: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if slots == 0 {
            if rest == 0 {
                out.push(Partition::new(cur.clone()).expect("valid by construction"));
            }
            return;
        }
        // the remaining slots - 1 parts need at least 1 each, and at most `part` each
        let hi = max.min(rest - (slots - 1));
        let lo = rest.div_ceil(slots);
        for part in (lo..=hi).rev() {
            cur.push(part);
            rec(rest - part, slots - 1, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, l, n, &mut Vec::with_capacity(l as usize), &mut out);
    Ok(out)
}

/// Number of partitions of `n` into exactly `l` parts (0 when `l > n` or `l == 0`, except `p(0,0) = 1`).
pub fn partition_count(n: u32, l: u32) -> u64 {
    let (n, l) = (n as usize, l as usize);
    if l > n {
        return 0;
    }
    // p(n, l) = p(n-1, l-1) + p(n-l, l)
    let mut table = vec![vec![0u64; l + 1]; n + 1];
    table[0][0] = 1;
    for m in 1..=n {
        for k in 1..=l.min(m) {
            table[m][k] = table[m - 1][k - 1] + table[m - k][k];
        }
    }
    table[n][l]
}

/// `mu ≤ lambda`: `mu` arises from `lambda` by merging adjacent parts.
pub fn leq_composition(mu: &Composition, lambda: &Composition) -> Result<bool> {
    if mu.n != lambda.n {
        return Err(Error::domain(format!("{mu} and {lambda} are compositions of different n")));
    }
    Ok(mu.prefix & !lambda.prefix == 0)
}

/// The composition recording how the parts of `fine` group into the parts of `coarse`.
///
/// Requires `coarse ≤ fine`; the result has length `ℓ(coarse)` and sums to `ℓ(fine)`.
pub fn quotient(coarse: &Composition, fine: &Composition) -> Result<Composition> {
    if !leq_composition(coarse, fine)? {
        return Err(Error::domain(format!("{coarse} is not below {fine}")));
    }
    Ok(quotient_unchecked(coarse.prefix, fine.prefix, coarse.len()))
}

/// Quotient from prefix masks; `coarse ⊆ fine` is assumed.
pub(crate) fn quotient_unchecked(coarse: u64, fine: u64, coarse_len: usize) -> Composition {
    let mut parts = Vec::with_capacity(coarse_len);
    let mut count = 0u32;
    let mut bits = fine;
    while bits != 0 {
        let low = bits & bits.wrapping_neg();
        count += 1;
        if coarse & low != 0 {
            parts.push(count);
            count = 0;
        }
        bits &= bits - 1;
    }
    Composition::new(parts).expect("nonempty blocks")
}

/// Parity class of a quotient, as used by the potential-poset axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parity {
    pub odd: bool,
    pub even: bool,
}

impl Parity {
    pub fn of(c: &Composition) -> Self {
        Self { odd: c.is_alternate_odd(), even: c.is_alternate_even() }
    }
}

/// `p ≤ q` for partitions: `p` arises from `q` by summing groups of parts.
pub fn leq_partition(p: &Partition, q: &Partition) -> Result<bool> {
    if p.n != q.n {
        return Err(Error::domain(format!("{p} and {q} are partitions of different n")));
    }
    if p.len() > q.len() {
        return Ok(false);
    }
    if p.len() == q.len() {
        return Ok(p == q);
    }
    let mut memo = HashMap::new();
    let mut caps = p.parts.clone();
    Ok(fill_blocks(&q.parts, 0, &mut caps, &mut memo))
}

/// Places `items[idx..]` (decreasing) into blocks with the given remaining capacities.
fn fill_blocks(items: &[u32], idx: usize, caps: &mut Vec<u32>, memo: &mut HashMap<(usize, Vec<u32>), bool>) -> bool {
    if idx == items.len() {
        return caps.iter().all(|&c| c == 0);
    }
    let mut key_caps = caps.clone();
    key_caps.sort_unstable();
    let key = (idx, key_caps);
    if let Some(&hit) = memo.get(&key) {
        return hit;
    }
    let item = items[idx];
    let mut tried = Vec::new();
    let mut found = false;
    for b in 0..caps.len() {
        let c = caps[b];
        if c < item || tried.contains(&c) {
            continue;
        }
        tried.push(c);
        caps[b] -= item;
        found = fill_blocks(items, idx + 1, caps, memo);
        caps[b] += item;
        if found {
            break;
        }
    }
    memo.insert(key, found);
    found
}

/// Compositions and partitions attached to minimal and maximal polynomials at level `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinMaxSets {
    pub p_min: Vec<Partition>,
    pub p_max: Vec<Partition>,
    pub c_min: Vec<Composition>,
    pub c_max: Vec<Composition>,
}

/// Alternate-odd (`c_min`) and alternate-even (`c_max`) compositions of `n` into `s` parts
/// and their sorted images.
pub fn min_max_sets(n: u32, s: u32) -> Result<MinMaxSets> {
    let all = enumerate_compositions(n, s)?;
    let c_min: Vec<_> = all.iter().filter(|c| c.is_alternate_odd()).cloned().collect();
    let c_max: Vec<_> = all.iter().filter(|c| c.is_alternate_even()).cloned().collect();
    let image = |cs: &[Composition]| {
        let set: BTreeSet<Partition> = cs.iter().map(Composition::to_partition).collect();
        // lexicographically decreasing, like enumerate_partitions
        set.into_iter().rev().collect::<Vec<_>>()
    };
    Ok(MinMaxSets { p_min: image(&c_min), p_max: image(&c_max), c_min, c_max })
}

pub fn binomial(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn composition_enumeration() {
        assert_eq!(enumerate_compositions(6, 4).unwrap().len(), 10);
        assert_eq!(enumerate_compositions(5, 1).unwrap(), vec![c(&[5])]);
        assert_eq!(enumerate_compositions(4, 2).unwrap(), vec![c(&[1, 3]), c(&[2, 2]), c(&[3, 1])]);
        assert!(enumerate_compositions(3, 4).is_err());
        assert!(enumerate_compositions(3, 0).is_err());
    }

    #[test]
    fn brute_force_compositions() {
        // every vector in [1, n]^l with the right sum, in lex order
        for n in 1..=7u32 {
            for l in 1..=n {
                let mut expect = Vec::new();
                let total = (n as usize).pow(l);
                for code in 0..total {
                    let mut x = code;
                    let mut parts = vec![0u32; l as usize];
                    for slot in parts.iter_mut().rev() {
                        *slot = (x % n as usize) as u32 + 1;
                        x /= n as usize;
                    }
                    if parts.iter().sum::<u32>() == n {
                        expect.push(c(&parts));
                    }
                }
                assert_eq!(enumerate_compositions(n, l).unwrap(), expect, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn partition_enumeration() {
        assert_eq!(enumerate_partitions(4, 2).unwrap(), vec![p(&[3, 1]), p(&[2, 2])]);
        assert_eq!(enumerate_partitions(6, 2).unwrap(), vec![p(&[5, 1]), p(&[4, 2]), p(&[3, 3])]);
        assert_eq!(enumerate_partitions(5, 5).unwrap(), vec![p(&[1, 1, 1, 1, 1])]);
        for n in 1..=12 {
            for l in 1..=n {
                let listed = enumerate_partitions(n, l).unwrap();
                assert_eq!(listed.len() as u64, partition_count(n, l));
                let from_comps: BTreeSet<_> =
                    enumerate_compositions(n, l).unwrap().iter().map(Composition::to_partition).collect();
                assert_eq!(listed, from_comps.into_iter().rev().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn composition_order() {
        assert!(leq_composition(&c(&[3, 3]), &c(&[1, 2, 2, 1])).unwrap());
        assert!(!leq_composition(&c(&[2, 4]), &c(&[1, 2, 2, 1])).unwrap());
        assert!(leq_composition(&c(&[6]), &c(&[1, 2, 2, 1])).unwrap());
        assert!(leq_composition(&c(&[6]), &c(&[1, 2, 2])).is_err());
    }

    #[test]
    fn quotients() {
        assert_eq!(quotient(&c(&[3, 3]), &c(&[1, 2, 2, 1])).unwrap(), c(&[2, 2]));
        assert_eq!(quotient(&c(&[6]), &c(&[1, 2, 2, 1])).unwrap(), c(&[4]));
        let mu = c(&[1, 2, 2, 1]);
        assert_eq!(quotient(&mu, &mu).unwrap(), c(&[1, 1, 1, 1]));
        assert!(quotient(&c(&[2, 4]), &mu).is_err());
    }

    #[test]
    fn alternation() {
        let cases = [(&[2, 1, 3, 1][..], true, false), (&[1, 2, 1, 3], false, true), (&[1, 1, 1, 1], true, true)];
        for (parts, odd, even) in cases {
            assert_eq!(c(parts).is_alternate_odd(), odd, "{parts:?}");
            assert_eq!(c(parts).is_alternate_even(), even, "{parts:?}");
        }
        // length one: (1) is both, (k) for k > 1 is only even
        assert!(c(&[1]).is_alternate_odd() && c(&[1]).is_alternate_even());
        assert!(!c(&[4]).is_alternate_odd() && c(&[4]).is_alternate_even());
    }

    #[test]
    fn covers() {
        assert_eq!(c(&[1, 1, 2, 2]).upper_covers(), vec![c(&[1, 1, 1, 1, 2]), c(&[1, 1, 2, 1, 1])]);
        assert!(c(&[1, 1, 1, 1]).upper_covers().is_empty());
        assert_eq!(c(&[3]).upper_covers(), vec![c(&[1, 2]), c(&[2, 1])]);
    }

    #[test]
    fn partition_order() {
        assert!(leq_partition(&p(&[2, 2, 1, 1]), &p(&[2, 2, 1, 1])).unwrap());
        assert!(leq_partition(&p(&[3, 1, 1, 1]), &p(&[2, 1, 1, 1, 1])).unwrap());
        assert!(!leq_partition(&p(&[2, 2, 2]), &p(&[3, 1, 1, 1])).unwrap());
        assert!(!leq_partition(&p(&[3, 1, 1, 1]), &p(&[3, 2, 1])).unwrap());
        assert!(leq_partition(&p(&[6]), &p(&[3, 2, 1])).unwrap());
        assert!(leq_partition(&p(&[5]), &p(&[3, 2, 1])).is_err());
    }

    #[test]
    fn min_max() {
        let sets = min_max_sets(6, 4).unwrap();
        assert_eq!(sets.c_min, vec![c(&[1, 1, 3, 1]), c(&[2, 1, 2, 1]), c(&[3, 1, 1, 1])]);
        assert_eq!(sets.p_min, vec![p(&[3, 1, 1, 1]), p(&[2, 2, 1, 1])]);
        assert_eq!(sets.p_min.len() as u64, partition_count(4, 2));
        assert_eq!(min_max_sets(8, 4).unwrap().p_min.len(), 3);
        assert_eq!(min_max_sets(1, 1).unwrap().c_min, vec![c(&[1])]);
        for n in 2..=9 {
            assert!(min_max_sets(n, 1).unwrap().c_min.is_empty());
        }
        for n in 1..=12u32 {
            for s in 1..=n {
                let sets = min_max_sets(n, s).unwrap();
                assert_eq!(sets.p_min.len() as u64, partition_count(n - s.div_ceil(2), s / 2), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(-1, 0), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn prefix_mask_round_trip() {
        for comp in compositions_from_length(7, 1).unwrap() {
            assert_eq!(Composition::from_prefix_mask(7, comp.prefix_mask()).unwrap(), comp);
        }
        assert!(Composition::new(vec![40, 30]).is_err());
    }

    #[test]
    fn json_shape() {
        assert_eq!(serde_json::to_string(&c(&[1, 2, 2, 1])).unwrap(), "[1,2,2,1]");
        let back: Composition = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(back, c(&[3, 1]));
        assert!(serde_json::from_str::<Composition>("[0,1]").is_err());
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
        assert_eq!("2,2,1,1".parse::<Partition>().unwrap(), p(&[2, 2, 1, 1]));
    }
}
