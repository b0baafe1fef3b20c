//! Numerically realized hyperbolic slices.
//!
//! A slice `H_s(F)` is identified with the Vandermonde varieties
//! `{x : e_i^μ(x) = (−1)^i F_i, i ≤ s}` intersected with the open Weyl chamber, one per
//! composition `μ`. All solving happens in normalized coordinates `u = (x − c) / h`, where
//! `c` is the mean root and `h` the root standard deviation; the map is an increasing
//! affine bijection of slices, so compositions and the order of `H_{s+1}` are unchanged.
//! Residuals are reported in these coordinates.

mod hessian;
mod poly;
mod reduce;
mod search;
mod solve;

pub use hessian::{
    fiber_pair, hessian_sign, hessian_sign_with, power_elem_duality, stratum_endpoints, Duality, HessianCheck, Role,
    StratumEndpoint,
};
pub use poly::{
    coeffs_from_multiset, coeffs_from_roots, elementary, elementary_from_power_sums, power_sums_from_coeffs,
    real_root_count_with_multiplicity, sturm_real_root_count, weighted_power_sums, HyperbolicPoly, PolyInput,
    TOL_COEFF,
};
pub use reduce::{elementary_under, parse_system, reduce_symmetric, PolyJson, QPolynomial, ReducedSystem, SystemInput, Term};
pub use search::{random_integer_roots, random_realize, SearchConfig, Witness};

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::f0_bound;
use crate::comb::{compositions_from_length, enumerate_compositions, Composition};
use crate::error::{Error, Result};
use crate::poset::{annotate_min_max, build_poset, extreme_edges, is_potential, Extreme};

/// Tolerances and search budget for realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizeConfig {
    /// Bound on `|e_i^μ(u) − e_i(F)|` for accepted vertices.
    pub tol_sys: f64,
    /// Minimum gap between distinct coordinates.
    pub tol_sep: f64,
    pub tol_grad: f64,
    /// Random Newton starts per unknown, per composition.
    pub starts_per_dim: usize,
    /// Budget multiplications after an axiom failure.
    pub escalations: u32,
    pub escalation_factor: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        Self {
            tol_sys: 1e-9,
            tol_sep: 1e-6,
            tol_grad: 1e-7,
            starts_per_dim: 200,
            escalations: 2,
            escalation_factor: 4,
            max_iter: 80,
            seed: 0,
        }
    }
}

/// One solved zero-dimensional stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub composition: Composition,
    /// Distinct roots, strictly increasing.
    pub x: Vec<f64>,
    /// `(H_{s+1}, …, H_n)` of `∏ (T − x_j)^{μ_j}`.
    pub tail_coeffs: Vec<f64>,
    pub residual: f64,
    /// Normalized roots used for all comparisons.
    #[serde(skip)]
    pub(crate) u: Vec<f64>,
}

impl Vertex {
    /// `H_{s+1}` in normalized coordinates, order-equivalent to `tail_coeffs[0]`.
    pub(crate) fn key(&self, s: usize) -> f64 {
        let c = coeffs_from_multiset(&self.u, self.composition.parts());
        c.get(s).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub center: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceRealization {
    pub schema: &'static str,
    #[serde(rename = "F")]
    pub f: HyperbolicPoly,
    pub s: usize,
    pub normalization: Normalization,
    /// Vertices of length-`s` compositions, sorted by composition then `x`.
    pub vertices: Vec<Vertex>,
    /// Polynomials of the slice with fewer than `s` distinct roots.
    pub degenerate: Vec<Vertex>,
    pub generic: bool,
    pub realized_facets: Vec<Composition>,
    pub starts_per_dim: usize,
    pub seed: u64,
    /// `|S| = f0_bound(n, s)`; recorded, never required.
    pub attains_f0_bound: bool,
}

impl SliceRealization {
    pub fn vertices_of<'a>(&'a self, mu: &Composition) -> impl Iterator<Item = &'a Vertex> + 'a {
        let mu = mu.clone();
        self.vertices.iter().filter(move |v| v.composition == mu)
    }
}

/// Normalized slice data shared by all solves.
pub(crate) struct Slice {
    pub n: usize,
    pub s: usize,
    pub norm: Normalization,
    /// Normalized power sums `q_1, …, q_s`.
    pub q: Vec<f64>,
    /// Normalized `e_1, …, e_s`.
    pub e: Vec<f64>,
    /// Sorted normalized roots (seeds only).
    pub roots: Vec<f64>,
    pub bound: f64,
}

impl Slice {
    pub fn new(f: &HyperbolicPoly, s: usize) -> Result<Self> {
        let n = f.n;
        if s == 0 || s > n {
            return Err(Error::domain(format!("need 1 <= s <= n, got n = {n}, s = {s}")));
        }
        let p = f.power_sums(s.max(2));
        let center = p[0] / n as f64;
        let variance = (p[1] / n as f64 - center * center).max(0.0);
        let scale = if variance > 1e-24 * (1.0 + center * center) { variance.sqrt() } else { 1.0 };
        let norm = Normalization { center, scale };
        // Σ ((x − c)/h)^i = h^{-i} Σ_k C(i,k) (−c)^{i−k} p_k
        let q: Vec<f64> = (1..=s)
            .map(|i| {
                let mut acc = 0.0;
                for k in 0..=i {
                    let pk = if k == 0 { n as f64 } else { p[k - 1] };
                    acc += crate::comb::binomial(i as i64, k as i64) as f64 * (-center).powi((i - k) as i32) * pk;
                }
                acc / scale.powi(i as i32)
            })
            .collect();
        let e = elementary_from_power_sums(&q);
        let roots: Vec<f64> = f.real_roots().iter().map(|r| (r - center) / scale).collect();
        Ok(Self { n, s, norm, q, e, roots, bound: 10.0 * (n as f64).sqrt() + 10.0 })
    }

    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|v| self.norm.center + self.norm.scale * v).collect()
    }

    /// Vertex record for normalized roots `u` of composition `mu`.
    pub fn vertex(&self, mu: &Composition, u: Vec<f64>) -> Vertex {
        let e_u = elementary(&u, mu.parts(), self.s);
        let residual = e_u.iter().zip(&self.e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let x = self.denormalize(&u);
        let coeffs = coeffs_from_multiset(&x, mu.parts());
        Vertex { composition: mu.clone(), tail_coeffs: coeffs[self.s..].to_vec(), x, residual, u }
    }

    fn seed_box(&self) -> (f64, f64) {
        match (self.roots.first(), self.roots.last()) {
            (Some(&lo), Some(&hi)) if hi - lo > 1e-9 => (lo, hi),
            _ => (-(self.n as f64).sqrt(), (self.n as f64).sqrt()),
        }
    }

    /// Distinct real solutions reached from all starts for `mult`, in their own order.
    pub fn raw_solutions(&self, mult: &[u32], starts: usize, rng: &mut ChaCha8Rng, max_iter: usize) -> Vec<Vec<f64>> {
        let l = mult.len();
        let (lo, hi) = self.seed_box();
        let mut seeds = Vec::with_capacity(starts + 1);
        if let Some(c) = solve::cluster_seed(&self.roots, mult) {
            seeds.push(c);
        }
        for _ in 0..starts {
            seeds.push(solve::random_seed(rng, l, lo, hi));
        }
        let mut found: Vec<Vec<f64>> = Vec::new();
        for seed in seeds {
            if let Some(u) = solve::newton_power_sums(&seed, mult, &self.q, self.bound, max_iter) {
                if !found.iter().any(|f| same_point(f, &u)) {
                    found.push(u);
                }
            }
        }
        found
    }
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-7)
}

fn min_gap(u: &[f64]) -> f64 {
    u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Sorts `u` together with its multiplicities.
fn sort_with(u: &[f64], mult: &[u32]) -> (Vec<f64>, Vec<u32>) {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    idx.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
    (idx.iter().map(|&i| u[i]).collect(), idx.iter().map(|&i| mult[i]).collect())
}

fn stream_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Chamber solutions of the system for one composition.
///
/// Newton runs from every start; solutions reached in another coordinate order belong to
/// the permuted composition and are dropped here (`realize_slice` pools them).
pub fn solve_vertices(f: &HyperbolicPoly, s: usize, mu: &Composition, config: &RealizeConfig) -> Result<Vec<Vertex>> {
    if mu.n() as usize != f.n || mu.len() != s {
        return Err(Error::domain(format!("{mu} is not a composition of {} into {s} parts", f.n)));
    }
    let slice = Slice::new(f, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 0));
    let mut out: Vec<Vertex> = slice
        .raw_solutions(mu.parts(), config.starts_per_dim * s, &mut rng, config.max_iter)
        .into_iter()
        .filter(|u| u.windows(2).all(|w| w[1] - w[0] > config.tol_sep))
        .map(|u| slice.vertex(mu, u))
        .filter(|v| v.residual <= config.tol_sys)
        .collect();
    out.sort_by(|a, b| a.u.iter().zip(&b.u).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn collect_vertices(slice: &Slice, comps: &[Composition], starts: usize, config: &RealizeConfig, offset: usize) -> Vec<Vertex> {
    let raw: Vec<(usize, Vec<Vec<f64>>)> = comps
        .par_iter()
        .enumerate()
        .map(|(i, mu)| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, offset + i));
            (i, slice.raw_solutions(mu.parts(), starts * mu.len(), &mut rng, config.max_iter))
        })
        .collect();
    let n = slice.n as u32;
    let mut pool: BTreeMap<Composition, Vec<Vec<f64>>> = BTreeMap::new();
    for (i, sols) in raw {
        for u in sols {
            let (sorted, mult) = sort_with(&u, comps[i].parts());
            if min_gap(&sorted) <= config.tol_sep {
                continue;
            }
            let comp = Composition::new(mult).expect("permutation of a composition");
            debug_assert_eq!(comp.n(), n);
            pool.entry(comp).or_default().push(sorted);
        }
    }
    let mut out = Vec::new();
    for (comp, mut sols) in pool {
        sols.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for u in sols {
            if !kept.iter().any(|k| same_point(k, &u)) {
                kept.push(u);
            }
        }
        for u in kept {
            let v = slice.vertex(&comp, u);
            if v.residual <= config.tol_sys {
                out.push(v);
            }
        }
    }
    out
}

fn realize_once(f: &HyperbolicPoly, s: usize, config: &RealizeConfig, starts: usize) -> Result<SliceRealization> {
    let slice = Slice::new(f, s)?;
    let n = f.n as u32;
    let facets = enumerate_compositions(n, s as u32)?;
    let vertices = collect_vertices(&slice, &facets, starts, config, 0);
    let shorter: Vec<Composition> = if s > 1 {
        compositions_from_length(n, 1)?.into_iter().filter(|c| c.len() < s).collect()
    } else {
        Vec::new()
    };
    let degenerate = collect_vertices(&slice, &shorter, starts, config, facets.len());
    let realized_facets: Vec<Composition> =
        vertices.iter().map(|v| v.composition.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let attains_f0_bound = f0_bound(n, s as u32).is_ok_and(|b| b == realized_facets.len() as u64);
    Ok(SliceRealization {
        schema: crate::SCHEMA_VERSION,
        f: f.clone(),
        s,
        normalization: slice.norm,
        generic: degenerate.is_empty(),
        vertices,
        degenerate,
        realized_facets,
        starts_per_dim: starts,
        seed: config.seed,
        attains_f0_bound,
    })
}

/// Why a generic realization is inconsistent with the potential-poset axioms.
fn axiom_failure(r: &SliceRealization) -> Option<String> {
    // the slice contains the sorted roots, so it is nonempty and has a vertex
    if r.vertices.is_empty() && r.degenerate.is_empty() {
        return Some("no vertex found".into());
    }
    if !r.generic || r.realized_facets.is_empty() {
        return None;
    }
    if r.realized_facets.iter().any(|mu| r.vertices_of(mu).count() > 1) {
        return Some("a composition has several vertices".into());
    }
    match is_potential(&r.realized_facets, r.f.n as u32, r.s as u32) {
        Ok((true, _)) => None,
        Ok((false, fail)) => Some(format!("axiom fails at {}", fail.map(|f| f.lambda.to_string()).unwrap_or_default())),
        Err(e) => Some(e.to_string()),
    }
}

/// Solves every composition of `n` into `s` parts and every shorter one.
///
/// Generic realizations must satisfy the potential-poset axioms; on failure the start
/// budget is escalated before giving up with [`Error::Incomplete`].
pub fn realize_slice(f: &HyperbolicPoly, s: usize, config: &RealizeConfig) -> Result<SliceRealization> {
    let mut starts = config.starts_per_dim;
    let mut last = None;
    for round in 0..=config.escalations {
        let r = realize_once(f, s, config, starts)?;
        match axiom_failure(&r) {
            None => return Ok(r),
            Some(msg) => last = Some((msg, r)),
        }
        if round < config.escalations {
            starts *= config.escalation_factor;
        }
    }
    let (msg, r) = last.expect("at least one round");
    Err(Error::Incomplete {
        message: format!("{msg} after {starts} starts per unknown"),
        partial: Some(Box::new(r)),
    })
}

/// Outcome of the numeric min/max checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinMaxReport {
    pub smallest: Composition,
    pub largest: Composition,
    pub smallest_alternate_odd: bool,
    pub largest_alternate_even: bool,
    pub edges_checked: usize,
    /// `(λ, μ_min, μ_max)` where `H_{s+1}(μ_min) ≥ H_{s+1}(μ_max)`.
    pub edge_violations: Vec<(Composition, Composition, Composition)>,
    /// Facets sorted by `H_{s+1}` extend the order generated by the edges.
    pub linear_extension: bool,
    pub passed: bool,
}

/// Checks the min/max characterization on a generic realization.
pub fn verify_min_max(r: &SliceRealization) -> Result<MinMaxReport> {
    if r.s < 2 {
        return Err(Error::domain("min/max checks need s >= 2"));
    }
    if !r.generic {
        return Err(Error::domain("min/max checks need a generic realization"));
    }
    let key: BTreeMap<&Composition, f64> = r.vertices.iter().map(|v| (&v.composition, v.key(r.s))).collect();
    if key.is_empty() {
        return Err(Error::domain("realization has no vertices"));
    }
    let by = |a: &&Composition, b: &&Composition| key[a].total_cmp(&key[b]);
    let mut order: Vec<&Composition> = key.keys().copied().collect();
    order.sort_by(by);
    let smallest = order[0].clone();
    let largest = order[order.len() - 1].clone();
    let poset = annotate_min_max(build_poset(&r.realized_facets, r.f.n as u32, r.s as u32)?);
    let mut edge_violations = Vec::new();
    let mut edges_checked = 0;
    for lambda in poset.level(r.s + 1) {
        let ann = poset.annotation(lambda).expect("annotated");
        if let (Extreme::Unique(lo), Extreme::Unique(hi)) = (&ann.mu_min, &ann.mu_max) {
            edges_checked += 1;
            if key[lo] >= key[hi] {
                edge_violations.push((lambda.clone(), lo.clone(), hi.clone()));
            }
        }
    }
    let rank: BTreeMap<&Composition, usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let linear_extension = extreme_edges(&poset)?.iter().all(|(lo, hi)| rank[lo] < rank[hi]);
    let smallest_alternate_odd = smallest.is_alternate_odd();
    let largest_alternate_even = largest.is_alternate_even();
    Ok(MinMaxReport {
        passed: smallest_alternate_odd && largest_alternate_even && edge_violations.is_empty() && linear_extension,
        smallest,
        largest,
        smallest_alternate_odd,
        largest_alternate_even,
        edges_checked,
        edge_violations,
        linear_extension,
    })
}
