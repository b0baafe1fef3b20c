//! Closed-form bounds: cyclic-polytope face counts, the upper bound theorem for strata
//! counts, and the three size bounds for Vandermonde coverings.

use std::collections::HashSet;

use serde::Serialize;

use crate::comb::{binomial, partition_count};
use crate::error::{Error, Result};

/// Facets of the cyclic polytope `C_d(m)` as bitmasks over `0..m`, via Gale's evenness
/// condition: every run of chosen indices not touching either end has even length.
pub fn gale_facets(d: usize, m: usize) -> Result<Vec<u64>> {
    if d < 1 || m < d + 1 || m > 64 {
        return Err(Error::domain(format!("cyclic polytope needs m >= d + 1 >= 2 and m <= 64, got d = {d}, m = {m}")));
    }
    let mut out = Vec::new();
    gale_rec(0, d, m, 0, 0, true, &mut out);
    Ok(out)
}

fn gale_rec(pos: usize, left: usize, m: usize, mask: u64, run: usize, run_at_start: bool, out: &mut Vec<u64>) {
    if left == 0 {
        // the remaining positions are unchosen and close the current run
        if run.is_multiple_of(2) || run_at_start || pos == m {
            out.push(mask);
        }
        return;
    }
    if m - pos < left {
        return;
    }
    // choose pos
    gale_rec(pos + 1, left - 1, m, mask | 1 << pos, run + 1, run_at_start, out);
    // skip pos: closes the current run
    if run.is_multiple_of(2) || run_at_start {
        gale_rec(pos + 1, left, m, mask, 0, false, out);
    }
}

/// `(f_0, …, f_{d-1})` of the cyclic polytope `C_d(m)`, counted from its Gale facets.
pub fn cyclic_face_vector(d: usize, m: usize) -> Result<Vec<u64>> {
    let facets = gale_facets(d, m)?;
    let mut seen: Vec<HashSet<u64>> = vec![HashSet::new(); d + 1];
    for &facet in &facets {
        // every nonempty subset of the facet
        let mut sub = facet;
        while sub != 0 {
            seen[sub.count_ones() as usize].insert(sub);
            sub = (sub - 1) & facet;
        }
    }
    Ok((1..=d).map(|k| seen[k].len() as u64).collect())
}

/// Per-index truth of `f_{d-i} ≤ c_{i-1}`, `i = 1..=d`, where `c` is the face vector of the
/// `d`-dimensional cyclic polytope on `f_{d-1}` vertices and `d = n - s`.
pub fn ubt_check(f: &[u64], n: u32, s: u32) -> Result<Vec<bool>> {
    if s > n || f.len() != (n - s) as usize + 1 {
        return Err(Error::domain(format!("f-vector of length {} does not match n = {n}, s = {s}", f.len())));
    }
    let d = (n - s) as usize;
    if d == 0 {
        return Ok(Vec::new());
    }
    let c = cyclic_face_vector(d, f[d - 1] as usize)?;
    Ok((1..=d).map(|i| f[d - i] <= c[i - 1]).collect())
}

/// Explicit bound on the number of zero-dimensional strata of a slice.
pub fn f0_bound(n: u32, s: u32) -> Result<u64> {
    if s == 0 || s > n {
        return Err(Error::domain(format!("need 1 <= s <= n, got n = {n}, s = {s}")));
    }
    let (n, s) = (i64::from(n), i64::from(s));
    Ok(if (n - s) % 2 == 0 {
        binomial((n + s) / 2 - 1, s - 1) + binomial((n + s) / 2 - 2, s - 1)
    } else {
        2 * binomial((n + s - 3) / 2, s - 1)
    })
}

fn check_covering_args(n: u32, s: u32) -> Result<()> {
    if s < 2 || s > n {
        return Err(Error::domain(format!("covering bounds need 2 <= s <= n, got n = {n}, s = {s}")));
    }
    Ok(())
}

/// Size of the minimal-partition covering, `|P(n - ⌈s/2⌉, ⌊s/2⌋)|`.
pub fn covering_upper_bound(n: u32, s: u32) -> Result<u64> {
    check_covering_args(n, s)?;
    Ok(partition_count(n - s.div_ceil(2), s / 2))
}

/// Pigeonhole bound `⌈2·upper / (⌈(s-1)/2⌉·⌈(s+1)/2⌉)⌉`.
pub fn covering_lower_trivial(n: u32, s: u32) -> Result<u64> {
    let upper = covering_upper_bound(n, s)?;
    let denom = u64::from((s - 1).div_ceil(2) * (s + 1).div_ceil(2));
    Ok((2 * upper).div_ceil(denom))
}

/// Recursive bound `Σ B_i` with `B_0 = 0`, `B_1 = 1` and
/// `B_i = ⌈2(|P(n-s+1, i)| - i·B_{i-1} - B_{i-2}) / (i² + i)⌉`, each clamped at 0.
pub fn covering_lower_recursive(n: u32, s: u32) -> Result<(u64, Vec<u64>)> {
    check_covering_args(n, s)?;
    let top = (s / 2) as usize;
    let mut b: Vec<u64> = vec![0, 1];
    for i in 2..=top {
        let num = 2 * partition_count(n - s + 1, i as u32) as i64 - 2 * (i as i64 * b[i - 1] as i64 + b[i - 2] as i64);
        let den = (i * i + i) as i64;
        // ceiling division; negative numerators clamp to zero
        let value = if num <= 0 { 0 } else { (num + den - 1) / den };
        b.push(value as u64);
    }
    b.truncate(top + 1);
    Ok((b.iter().sum(), b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub schema: &'static str,
    pub n: u32,
    pub s: u32,
    pub f0_bound: u64,
    /// Upper bound on `f_i` for each `i = 0..d`, from the cyclic polytope on `n - 1` vertices.
    pub f_bound: Vec<u64>,
    pub covering_upper: u64,
    pub covering_lower_trivial: u64,
    pub covering_lower_recursive: u64,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
}

/// All bounds for `(n, s)`, `2 <= s <= n`.
pub fn bound_report(n: u32, s: u32) -> Result<BoundReport> {
    check_covering_args(n, s)?;
    let d = (n - s) as usize;
    // any slice has at most n - 1 strata of dimension d - 1
    let f_bound = if d == 0 {
        vec![1]
    } else {
        let c = cyclic_face_vector(d, (n - 1) as usize)?;
        let mut out: Vec<u64> = (0..d).map(|i| c[d - 1 - i]).collect();
        out.push(1);
        out
    };
    let (recursive, b) = covering_lower_recursive(n, s)?;
    Ok(BoundReport {
        schema: crate::SCHEMA_VERSION,
        n,
        s,
        f0_bound: f0_bound(n, s)?,
        f_bound,
        covering_upper: covering_upper_bound(n, s)?,
        covering_lower_trivial: covering_lower_trivial(n, s)?,
        covering_lower_recursive: recursive,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::h_from_f;

    /// Brute-force Gale evenness over all d-subsets.
    fn gale_brute(d: usize, m: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for mask in 0u64..1 << m {
            if mask.count_ones() as usize != d {
                continue;
            }
            let ok = (0..m).all(|i| {
                (i + 1..m).all(|j| {
                    let outside = mask >> i & 1 == 0 && mask >> j & 1 == 0;
                    let between = (i + 1..j).filter(|&k| mask >> k & 1 == 1).count();
                    !outside || between % 2 == 0
                })
            });
            if ok {
                out.push(mask);
            }
        }
        out
    }

    #[test]
    fn gale_generation_matches_filter() {
        for d in 1..=6 {
            for m in d + 1..=11 {
                let mut fast = gale_facets(d, m).unwrap();
                fast.sort_unstable();
                assert_eq!(fast, gale_brute(d, m), "d={d} m={m}");
            }
        }
    }

    #[test]
    fn cyclic_examples() {
        assert_eq!(cyclic_face_vector(4, 6).unwrap(), vec![6, 15, 18, 9]);
        assert_eq!(cyclic_face_vector(3, 5).unwrap(), vec![5, 9, 6]);
        for m in 3..=12 {
            assert_eq!(cyclic_face_vector(2, m).unwrap(), vec![m as u64, m as u64]);
        }
        assert!(cyclic_face_vector(3, 3).is_err());
        assert!(cyclic_face_vector(0, 3).is_err());
    }

    #[test]
    fn cyclic_euler_and_dehn_sommerville() {
        for d in 1..=8usize {
            for m in d + 1..=14 {
                let c = cyclic_face_vector(d, m).unwrap();
                let euler: i64 = c.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
                // χ of a (d-1)-sphere
                assert_eq!(euler, if d % 2 == 1 { 2 } else { 0 }, "d={d} m={m}");
                // h-vector of the boundary complex: f-vector (1, f_0, ..., f_{d-1}) read in reverse
                let mut f: Vec<u64> = c.iter().rev().copied().collect();
                f.push(1);
                let h = h_from_f(&f);
                assert!(h.iter().eq(h.iter().rev()), "d={d} m={m} h={h:?}");
                // neighborly: h_i = C(m-d-1+i, i) for i <= d/2
                for i in 0..=d / 2 {
                    assert_eq!(h[i] as u64, binomial((m - d - 1 + i) as i64, i as i64));
                }
            }
        }
    }

    #[test]
    fn ubt_examples() {
        assert_eq!(ubt_check(&[4, 4, 1], 6, 4).unwrap(), vec![true, true]);
        // five vertices of a polygon but seven edges is impossible
        assert_eq!(ubt_check(&[7, 5, 1], 7, 5).unwrap(), vec![true, false]);
        assert!(ubt_check(&[1, 1], 6, 4).is_err());
        assert!(ubt_check(&[1], 4, 4).unwrap().is_empty());
    }

    #[test]
    fn f0_values() {
        assert_eq!(f0_bound(6, 3).unwrap(), 6);
        assert_eq!(f0_bound(8, 4).unwrap(), 14);
        for n in 1..=12 {
            assert_eq!(f0_bound(n, n).unwrap(), 1);
        }
        assert!(f0_bound(3, 4).is_err());
    }

    #[test]
    fn f0_bound_is_the_cyclic_facet_count() {
        // first form of the bound, as binomials in n and n - s
        for n in 3..=10u32 {
            for s in 2..n {
                let d = (n - s) as usize;
                let c = cyclic_face_vector(d, (n - 1) as usize).unwrap();
                assert_eq!(f0_bound(n, s).unwrap(), c[d - 1], "n={n} s={s}");
                let (n, k) = (i64::from(n), i64::from(n - s));
                let first = if k % 2 == 0 {
                    binomial(n - 1 - k / 2, k / 2) + binomial(n - 2 - k / 2, k / 2 - 1)
                } else {
                    2 * binomial(n - 2 - (k - 1) / 2, (k - 1) / 2)
                };
                assert_eq!(first, f0_bound(n as u32, s).unwrap());
            }
        }
    }

    #[test]
    fn covering_bounds() {
        assert_eq!(covering_upper_bound(8, 4).unwrap(), 3);
        assert_eq!(covering_lower_recursive(8, 4).unwrap(), (1, vec![0, 1, 0]));
        assert_eq!(covering_lower_trivial(6, 4).unwrap(), 1);
        assert!(covering_upper_bound(5, 1).is_err());
        assert!(covering_lower_recursive(3, 4).is_err());
        for n in 2..=14u32 {
            for s in 2..=n {
                let up = covering_upper_bound(n, s).unwrap();
                assert!(covering_lower_trivial(n, s).unwrap() <= up, "n={n} s={s}");
                assert!(covering_lower_recursive(n, s).unwrap().0 <= up, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn report() {
        let r = bound_report(8, 4).unwrap();
        assert_eq!(r.f0_bound, 14);
        assert_eq!(r.f_bound, vec![14, 28, 21, 7, 1]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["B"], serde_json::json!([0, 1, 0]));
    }
}
