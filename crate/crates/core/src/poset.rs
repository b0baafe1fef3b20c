//! Posets generated by a set of length-`s` compositions and their dual complexes.
//!
//! For a facet set `S ⊆ C(n, s)` the poset `L(S)` is the upward closure of `S` in the
//! refinement order, plus a formal bottom `(n)`. Each element `λ` dominates some facets
//! `μ ≤ λ`; the quotient `μ/λ` is classified as alternate odd or even, and `L(S)` is
//! *potential* when every `λ` of length at least `s` has exactly one facet of each kind.
//!
//! Faces of the dual complex are encoded as bitmasks over `[n-1]`: the face of `λ` is the
//! complement of its prefix sums.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt::Write as _;

use serde::Serialize;

use crate::comb::{binomial, leq_composition, quotient_unchecked, Composition, Parity};
use crate::error::{Error, Result};

/// Outcome of the unique-extreme search for one element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "facets", rename_all = "snake_case")]
pub enum Extreme {
    Unique(Composition),
    Missing,
    Ambiguous(Vec<Composition>),
}

impl Extreme {
    pub fn unique(&self) -> Option<&Composition> {
        match self {
            Extreme::Unique(c) => Some(c),
            _ => None,
        }
    }

    fn from_candidates(mut found: Vec<Composition>) -> Self {
        match found.len() {
            0 => Extreme::Missing,
            1 => Extreme::Unique(found.pop().expect("one element")),
            _ => Extreme::Ambiguous(found),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub mu_min: Extreme,
    pub mu_max: Extreme,
}

impl Annotation {
    pub fn is_ok(&self) -> bool {
        self.mu_min.unique().is_some() && self.mu_max.unique().is_some()
    }
}

/// `L(S)` materialized level by level.
#[derive(Debug, Clone)]
pub struct StrataPoset {
    n: u32,
    s: u32,
    facets: Vec<Composition>,
    /// `levels[i]` holds the elements of length `s + i`, sorted.
    levels: Vec<Vec<Composition>>,
    bottom: Composition,
    annotations: BTreeMap<Composition, Annotation>,
}

impl StrataPoset {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Dimension of the slice, `n - s`.
    pub fn dim(&self) -> usize {
        (self.n - self.s) as usize
    }

    pub fn facets(&self) -> &[Composition] {
        &self.facets
    }

    pub fn levels(&self) -> &[Vec<Composition>] {
        &self.levels
    }

    /// Elements of the given length (empty outside `s..=n`).
    pub fn level(&self, len: usize) -> &[Composition] {
        len.checked_sub(self.s as usize).and_then(|i| self.levels.get(i)).map_or(&[], Vec::as_slice)
    }

    pub fn bottom(&self) -> &Composition {
        &self.bottom
    }

    pub fn elements(&self) -> impl Iterator<Item = &Composition> {
        self.levels.iter().flatten()
    }

    pub fn contains(&self, c: &Composition) -> bool {
        self.level(c.len()).binary_search(c).is_ok()
    }

    pub fn annotation(&self, lambda: &Composition) -> Option<&Annotation> {
        self.annotations.get(lambda)
    }

    pub fn is_annotated(&self) -> bool {
        !self.annotations.is_empty()
    }

    /// Facets `μ ≤ λ`.
    pub fn dominated_facets<'a>(&'a self, lambda: &'a Composition) -> impl Iterator<Item = &'a Composition> + 'a {
        let mask = lambda.prefix_mask();
        self.facets.iter().filter(move |mu| mu.prefix_mask() & !mask == 0)
    }

    /// Hasse edges `(lower, upper)` among elements of length `≥ s`.
    pub fn cover_edges(&self) -> Vec<(&Composition, &Composition)> {
        let mut edges = Vec::new();
        for pair in self.levels.windows(2) {
            for lower in &pair[0] {
                for upper in &pair[1] {
                    if upper.prefix_mask() & lower.prefix_mask() == lower.prefix_mask() {
                        edges.push((lower, upper));
                    }
                }
            }
        }
        edges
    }
}

fn validate_facets(facets: &[Composition], n: u32, s: u32) -> Result<Vec<Composition>> {
    if facets.is_empty() {
        return Err(Error::domain("the facet set is empty"));
    }
    if s == 0 || s > n {
        return Err(Error::domain(format!("need 1 <= s <= n, got n = {n}, s = {s}")));
    }
    for mu in facets {
        if mu.n() != n || mu.len() != s as usize {
            return Err(Error::domain(format!("{mu} is not a composition of {n} into {s} parts")));
        }
    }
    let set: BTreeSet<_> = facets.iter().cloned().collect();
    Ok(set.into_iter().collect())
}

/// Upward closure of `facets` plus the formal bottom `(n)`.
pub fn build_poset(facets: &[Composition], n: u32, s: u32) -> Result<StrataPoset> {
    let facets = validate_facets(facets, n, s)?;
    let mut levels = vec![facets.clone()];
    for _ in s..n {
        let next: BTreeSet<Composition> =
            levels.last().expect("nonempty").iter().flat_map(Composition::upper_covers).collect();
        levels.push(next.into_iter().collect());
    }
    Ok(StrataPoset { n, s, facets, levels, bottom: Composition::new(vec![n])?, annotations: BTreeMap::new() })
}

/// Records, for each element of length `≥ s`, its unique alternate-odd facet (`mu_min`)
/// and unique alternate-even facet (`mu_max`), or why there is none.
pub fn annotate_min_max(mut poset: StrataPoset) -> StrataPoset {
    let mut annotations = BTreeMap::new();
    for lambda in poset.elements() {
        let (mut odd, mut even) = (Vec::new(), Vec::new());
        for mu in poset.dominated_facets(lambda) {
            let q = quotient_unchecked(mu.prefix_mask(), lambda.prefix_mask(), mu.len());
            let parity = Parity::of(&q);
            if parity.odd {
                odd.push(mu.clone());
            }
            if parity.even {
                even.push(mu.clone());
            }
        }
        annotations.insert(
            lambda.clone(),
            Annotation { mu_min: Extreme::from_candidates(odd), mu_max: Extreme::from_candidates(even) },
        );
    }
    poset.annotations = annotations;
    poset
}

/// The first element violating the potential-poset axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub lambda: Composition,
    pub annotation: Annotation,
}

/// Checks the potential-poset axioms on an annotated poset.
///
/// The formal bottom `(n)` dominates no facet and is not checked.
pub fn check_potential(poset: &StrataPoset) -> Option<AxiomFailure> {
    assert!(poset.is_annotated(), "poset must be annotated first");
    poset.elements().find_map(|lambda| {
        let annotation = poset.annotation(lambda).expect("every element is annotated");
        (!annotation.is_ok()).then(|| AxiomFailure { lambda: lambda.clone(), annotation: annotation.clone() })
    })
}

pub fn is_potential(facets: &[Composition], n: u32, s: u32) -> Result<(bool, Option<AxiomFailure>)> {
    let poset = annotate_min_max(build_poset(facets, n, s)?);
    let failure = check_potential(&poset);
    Ok((failure.is_none(), failure))
}

/// Boundary complex of the dual poset, faces as bitmasks over `[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualComplex {
    n: u32,
    /// Facet size `n - s`.
    d: usize,
    faces: BTreeSet<u64>,
    facets: Vec<u64>,
}

/// Face of `λ`: `[n-1]` minus the prefix sums of `λ`.
pub fn face_of(lambda: &Composition) -> u64 {
    let n = lambda.n();
    let ground = (1u64 << (n - 1)) - 1;
    ground & !lambda.prefix_mask()
}

impl DualComplex {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of vertices in each facet (`n - s`); the complex has dimension `d - 1`.
    pub fn facet_size(&self) -> usize {
        self.d
    }

    pub fn faces(&self) -> &BTreeSet<u64> {
        &self.faces
    }

    pub fn facets(&self) -> &[u64] {
        &self.facets
    }

    pub fn contains(&self, face: u64) -> bool {
        self.faces.contains(&face)
    }

    /// Inclusion-maximal faces.
    pub fn maximal_faces(&self) -> Vec<u64> {
        self.faces
            .iter()
            .copied()
            .filter(|&f| !self.faces.iter().any(|&g| g != f && g & f == f))
            .collect()
    }

    pub fn is_pure(&self) -> bool {
        self.maximal_faces().iter().all(|f| f.count_ones() as usize == self.d)
    }

    /// For every ridge, the number of facets containing it.
    pub fn ridge_degrees(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for &f in self.faces.iter().filter(|f| f.count_ones() as usize + 1 == self.d) {
            out.insert(f, self.facets.iter().filter(|&&g| g & f == f).count());
        }
        out
    }

    pub fn every_ridge_in_two_facets(&self) -> bool {
        self.ridge_degrees().values().all(|&k| k == 2)
    }

    /// f-vector of the complex itself: `out[k]` counts faces with `k` vertices.
    pub fn face_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.d + 1];
        for f in &self.faces {
            out[f.count_ones() as usize] += 1;
        }
        out
    }
}

pub fn dual_complex(poset: &StrataPoset) -> Result<DualComplex> {
    let faces: BTreeSet<u64> = poset.elements().map(face_of).collect();
    for &face in &faces {
        let mut bits = face;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            if !faces.contains(&(face & !low)) {
                return Err(Error::structural(format!(
                    "face {face:#b} has a missing subface {:#b}; the input is not closed",
                    face & !low
                )));
            }
            bits &= bits - 1;
        }
    }
    let facets = poset.facets().iter().map(face_of).collect();
    Ok(DualComplex { n: poset.n(), d: poset.dim(), faces, facets })
}

/// Strata counts by dimension and the associated h-vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceVectors {
    pub d: usize,
    pub f: Vec<u64>,
    pub h: Vec<i64>,
}

/// `h_i = Σ_{j ≤ i} (-1)^{i-j} C(d-j, i-j) f_{d-j}`.
pub fn h_from_f(f: &[u64]) -> Vec<i64> {
    let d = f.len() - 1;
    (0..=d)
        .map(|i| {
            (0..=i)
                .map(|j| {
                    let term = binomial((d - j) as i64, (i - j) as i64) as i64 * f[d - j] as i64;
                    if (i - j) % 2 == 0 { term } else { -term }
                })
                .sum()
        })
        .collect()
}

/// `f_{d-i} = Σ_{j ≤ i} C(d-j, i-j) h_j`.
pub fn f_from_h(h: &[i64]) -> Vec<i64> {
    let d = h.len() - 1;
    let mut f = vec![0i64; d + 1];
    for i in 0..=d {
        f[d - i] = (0..=i).map(|j| binomial((d - j) as i64, (i - j) as i64) as i64 * h[j]).sum();
    }
    f
}

/// `f_i` = number of elements of length `s + i` (`f_d = 1`).
pub fn face_vectors(poset: &StrataPoset) -> FaceVectors {
    let d = poset.dim();
    let mut f: Vec<u64> = (0..d).map(|i| poset.levels()[i].len() as u64).collect();
    f.push(1);
    let h = h_from_f(&f);
    FaceVectors { d, f, h }
}

pub fn dehn_sommerville_check(h: &[i64]) -> bool {
    h.iter().eq(h.iter().rev())
}

/// Canonical `i`-binomial representation `a = C(a_i, i) + C(a_{i-1}, i-1) + …` with
/// `a_i > a_{i-1} > … ≥ 1`, returned as `(a_k, k)` pairs.
pub fn binomial_representation(mut a: u64, i: u32) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut k = i;
    while a > 0 && k > 0 {
        let mut top = u64::from(k);
        while binomial(top as i64 + 1, i64::from(k)) <= a {
            top += 1;
        }
        a -= binomial(top as i64, i64::from(k));
        out.push((top, k));
        k -= 1;
    }
    out
}

/// Macaulay pseudo-power `a^{<i>} = Σ C(a_k + 1, k + 1)`.
pub fn pseudo_power(a: u64, i: u32) -> u64 {
    binomial_representation(a, i).into_iter().map(|(top, k)| binomial(top as i64 + 1, i64::from(k) + 1)).sum()
}

pub fn macaulay_check(g: &[i64]) -> bool {
    if g.first() != Some(&1) || g.iter().any(|&x| x < 0) {
        return false;
    }
    (1..g.len().saturating_sub(1)).all(|i| g[i + 1] as u64 <= pseudo_power(g[i] as u64, i as u32))
}

/// Dehn–Sommerville, monotone first half, and the Macaulay condition on the g-vector.
pub fn g_theorem_check(h: &[i64]) -> bool {
    if h.is_empty() || !dehn_sommerville_check(h) {
        return false;
    }
    let half = (h.len() - 1) / 2;
    if (1..=half).any(|i| h[i] < h[i - 1]) {
        return false;
    }
    let g: Vec<i64> = (0..=half).map(|i| if i == 0 { h[0] } else { h[i] - h[i - 1] }).collect();
    macaulay_check(&g)
}

/// `mu_min(λ) → mu_max(λ)` for every element `λ` of length `s + 1`.
pub fn extreme_edges(poset: &StrataPoset) -> Result<Vec<(Composition, Composition)>> {
    if !poset.is_annotated() {
        return Err(Error::domain("poset must be annotated"));
    }
    let mut edges = Vec::new();
    for lambda in poset.level(poset.s() as usize + 1) {
        let ann = poset.annotation(lambda).expect("annotated");
        match (ann.mu_min.unique(), ann.mu_max.unique()) {
            (Some(lo), Some(hi)) => edges.push((lo.clone(), hi.clone())),
            _ => return Err(Error::structural(format!("{lambda} has no unique min/max facet"))),
        }
    }
    Ok(edges)
}

/// A linear extension of the order generated by the extreme edges, ties broken
/// lexicographically. A cycle is a structural error.
pub fn shelling_order(poset: &StrataPoset) -> Result<Vec<Composition>> {
    if let Some(fail) = check_potential(poset) {
        return Err(Error::structural(format!("poset is not potential: {} fails", fail.lambda)));
    }
    let facets = poset.facets();
    let index = |c: &Composition| facets.binary_search(c).expect("edge endpoints are facets");
    let mut succ = vec![Vec::new(); facets.len()];
    let mut indegree = vec![0usize; facets.len()];
    for (lo, hi) in extreme_edges(poset)? {
        let (a, b) = (index(&lo), index(&hi));
        succ[a].push(b);
        indegree[b] += 1;
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..facets.len()).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(facets.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(facets[i].clone());
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() != facets.len() {
        let stuck: Vec<String> =
            (0..facets.len()).filter(|&i| indegree[i] > 0).map(|i| facets[i].to_string()).collect();
        return Err(Error::structural(format!(
            "the min/max order has a cycle through {}; facets {:?}",
            stuck.join(" "),
            facets
        )));
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellingCheck {
    pub valid: bool,
    /// `|R_j|` for each facet in order.
    pub restrictions: Vec<usize>,
}

impl ShellingCheck {
    /// Number of facets with each restriction size `0..=d`.
    pub fn histogram(&self, d: usize) -> Vec<i64> {
        let mut out = vec![0i64; d + 1];
        for &r in &self.restrictions {
            if r <= d {
                out[r] += 1;
            }
        }
        out
    }
}

/// Tests the shelling condition for `order` and computes restriction sizes.
///
/// Facet `F_j` is accepted when every maximal face of `⋃_{i<j} (F_i ∩ F_j)` has `d - 1`
/// vertices.
pub fn verify_shelling(complex: &DualComplex, order: &[Composition]) -> Result<ShellingCheck> {
    let faces: Vec<u64> = order.iter().map(face_of).collect();
    let listed: BTreeSet<u64> = faces.iter().copied().collect();
    let expected: BTreeSet<u64> = complex.facets().iter().copied().collect();
    if listed != expected || faces.len() != expected.len() {
        return Err(Error::domain("the order must list every facet exactly once"));
    }
    let d = complex.facet_size();
    let mut valid = true;
    let mut restrictions = Vec::with_capacity(faces.len());
    for (j, &fj) in faces.iter().enumerate() {
        let meets: Vec<u64> = faces[..j].iter().map(|&fi| fi & fj).collect();
        let maximal = meets.iter().filter(|&&a| !meets.iter().any(|&b| b != a && b & a == a));
        if j > 0 && maximal.clone().any(|m| m.count_ones() as usize + 1 != d) {
            valid = false;
        }
        let restriction = (0..complex.n() - 1)
            .map(|v| 1u64 << v)
            .filter(|&bit| fj & bit != 0 && meets.contains(&(fj & !bit)))
            .count();
        restrictions.push(restriction);
    }
    Ok(ShellingCheck { valid, restrictions })
}

/// Histograms over facets of how many length-`(s+1)` elements each one is `mu_max`
/// (first) and `mu_min` (second) for.
pub fn extreme_histograms(poset: &StrataPoset) -> Result<(Vec<i64>, Vec<i64>)> {
    let d = poset.dim();
    let mut as_max: BTreeMap<&Composition, usize> = poset.facets().iter().map(|f| (f, 0)).collect();
    let mut as_min = as_max.clone();
    let edges = extreme_edges(poset)?;
    for (lo, hi) in &edges {
        *as_min.get_mut(lo).expect("facet") += 1;
        *as_max.get_mut(hi).expect("facet") += 1;
    }
    let hist = |m: &BTreeMap<&Composition, usize>| {
        let mut out = vec![0i64; d + 1];
        for &k in m.values() {
            if k <= d {
                out[k] += 1;
            }
        }
        out
    };
    Ok((hist(&as_max), hist(&as_min)))
}

/// Full structural report for a facet set.
#[derive(Debug, Clone, Serialize)]
pub struct PosetReport {
    pub schema: &'static str,
    pub n: u32,
    pub s: u32,
    pub facets: Vec<Composition>,
    pub elements_by_length: Vec<Vec<Composition>>,
    pub f: Vec<u64>,
    pub h: Vec<i64>,
    pub potential: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<AxiomFailure>,
    pub shelling: Vec<Composition>,
    pub shelling_verified: bool,
    pub reverse_shelling_verified: bool,
    pub restrictions: Vec<usize>,
    pub g_theorem: bool,
}

/// Builds and checks `L(S)`; shelling fields are only filled for potential posets.
pub fn analyze(facets: &[Composition], n: u32, s: u32) -> Result<(StrataPoset, PosetReport)> {
    let poset = annotate_min_max(build_poset(facets, n, s)?);
    let failure = check_potential(&poset);
    let fv = face_vectors(&poset);
    let mut report = PosetReport {
        schema: crate::SCHEMA_VERSION,
        n,
        s,
        facets: poset.facets().to_vec(),
        elements_by_length: poset.levels().to_vec(),
        f: fv.f.clone(),
        h: fv.h.clone(),
        potential: failure.is_none(),
        failure,
        shelling: Vec::new(),
        shelling_verified: false,
        reverse_shelling_verified: false,
        restrictions: Vec::new(),
        g_theorem: g_theorem_check(&fv.h),
    };
    if report.potential {
        let complex = dual_complex(&poset)?;
        let order = shelling_order(&poset)?;
        let forward = verify_shelling(&complex, &order)?;
        let reversed: Vec<_> = order.iter().rev().cloned().collect();
        report.reverse_shelling_verified = verify_shelling(&complex, &reversed)?.valid;
        report.shelling_verified = forward.valid;
        report.restrictions = forward.restrictions;
        report.shelling = order;
    }
    Ok((poset, report))
}

fn dot_escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// Graphviz rendering of the Hasse diagram, bottom to top.
pub fn to_dot(poset: &StrataPoset) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    let bottom = poset.bottom().to_string();
    let _ = writeln!(out, "  \"{}\" [label=\"{}\", style=dashed];", dot_escape(&bottom), dot_escape(&bottom));
    for lambda in poset.elements() {
        let name = lambda.to_string();
        let mut label = name.clone();
        if lambda.len() > poset.s() as usize {
            if let Some(ann) = poset.annotation(lambda) {
                let show = |e: &Extreme| match e {
                    Extreme::Unique(c) => c.to_string(),
                    Extreme::Missing => "none".into(),
                    Extreme::Ambiguous(cs) => format!("{cs:?}"),
                };
                let _ = write!(label, "\\nmin {}\\nmax {}", show(&ann.mu_min), show(&ann.mu_max));
            }
        }
        let _ = writeln!(out, "  \"{}\" [label=\"{}\"];", dot_escape(&name), dot_escape(&label));
    }
    for facet in poset.facets() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", dot_escape(&bottom), dot_escape(&facet.to_string()));
    }
    for (lo, hi) in poset.cover_edges() {
        let _ = writeln!(out, "  \"{lo}\" -> \"{hi}\";");
    }
    out.push_str("}\n");
    out
}

/// Checks `μ ≤ λ` without the `n` test, for callers that already validated inputs.
pub fn dominates(lambda: &Composition, mu: &Composition) -> bool {
    leq_composition(mu, lambda).unwrap_or(false)
}
