//! Randomized search for a polynomial realizing a prescribed facet set.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{realize_slice, HyperbolicPoly, RealizeConfig};
use crate::comb::Composition;
use crate::error::{Error, Result};
use crate::poset::is_potential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Number of slice realizations tried.
    pub budget: usize,
    /// Newton starts per unknown during the search; the witness is re-checked with
    /// the full configuration.
    pub starts_per_dim: usize,
    /// Hill-climbing moves per random restart.
    pub climb_steps: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { budget: 400, starts_per_dim: 25, climb_steps: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub roots: Vec<f64>,
    pub f: HyperbolicPoly,
    pub facets: Vec<Composition>,
    /// Realizations spent, including the final check.
    pub evaluations: usize,
    pub seed: u64,
}

/// `n` distinct integers from `[−r, r]`, sorted.
pub fn random_integer_roots(rng: &mut impl Rng, n: usize, r: i64) -> Vec<f64> {
    let pool: Vec<i64> = (-r..=r).collect();
    let mut roots: Vec<f64> = pool.choose_multiple(rng, n).map(|&v| v as f64).collect();
    roots.sort_by(f64::total_cmp);
    roots
}

fn facets_of(roots: &[f64], s: usize, starts: usize, seed: u64) -> Option<BTreeSet<Composition>> {
    let f = HyperbolicPoly::from_roots(roots.to_vec()).ok()?;
    let cfg = RealizeConfig { starts_per_dim: starts, escalations: 0, seed, ..Default::default() };
    let r = realize_slice(&f, s, &cfg).ok()?;
    r.generic.then(|| r.realized_facets.into_iter().collect())
}

fn distance(a: &BTreeSet<Composition>, b: &BTreeSet<Composition>) -> usize {
    a.symmetric_difference(b).count()
}

/// Searches for `F` with distinct roots whose generic slice at level `s` has exactly
/// the facets `target`.
///
/// Random integer roots in `[−3n, 3n]` seed a hill climb on real root vectors; a root
/// vector realizing the reversed target is mirrored. `Ok(None)` means the budget ran out.
pub fn random_realize(target: &[Composition], n: usize, s: usize, config: &SearchConfig) -> Result<Option<Witness>> {
    let (ok, failure) = is_potential(target, n as u32, s as u32)?;
    if !ok {
        let at = failure.map(|f| format!(" (fails at {})", f.lambda)).unwrap_or_default();
        return Err(Error::domain(format!("target is not a potential poset{at}")));
    }
    if s < 2 {
        return Err(Error::domain("need s >= 2"));
    }
    let want: BTreeSet<Composition> = target.iter().cloned().collect();
    let mirrored: BTreeSet<Composition> = target.iter().map(Composition::reversed).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let radius = 3 * n as i64;
    let mut evaluations = 0;

    let finish = |roots: Vec<f64>, evaluations: usize| -> Result<Option<Witness>> {
        let f = HyperbolicPoly::from_roots(roots.clone())?;
        let full = realize_slice(&f, s, &RealizeConfig { seed: config.seed, ..Default::default() })?;
        let got: BTreeSet<Composition> = full.realized_facets.iter().cloned().collect();
        if full.generic && got == want {
            Ok(Some(Witness { roots, f, facets: full.realized_facets, evaluations: evaluations + 1, seed: config.seed }))
        } else {
            Ok(None)
        }
    };
    let mirror = |roots: &[f64]| -> Vec<f64> {
        let mut m: Vec<f64> = roots.iter().map(|r| -r).collect();
        m.sort_by(f64::total_cmp);
        m
    };

    while evaluations < config.budget {
        let mut current = random_integer_roots(&mut rng, n, radius);
        evaluations += 1;
        let Some(mut got) = facets_of(&current, s, config.starts_per_dim, config.seed) else { continue };
        let mut best = distance(&got, &want).min(distance(&got, &mirrored));
        let mut step = 2.0;
        for _ in 0..config.climb_steps {
            if best == 0 || evaluations >= config.budget {
                break;
            }
            let mut cand = current.clone();
            let i = rng.gen_range(0..n);
            cand[i] += rng.gen_range(-step..=step);
            cand.sort_by(f64::total_cmp);
            evaluations += 1;
            if cand.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let Some(g) = facets_of(&cand, s, config.starts_per_dim, config.seed) else { continue };
            let d = distance(&g, &want).min(distance(&g, &mirrored));
            if d <= best {
                if d < best {
                    step = 2.0;
                }
                best = d;
                current = cand;
                got = g;
            } else {
                step = (step * 0.7).max(0.05);
            }
        }
        if best == 0 {
            let roots = if got == want { current } else { mirror(&current) };
            if let Some(w) = finish(roots, evaluations)? {
                return Ok(Some(w));
            }
            evaluations += 1;
        }
    }
    Ok(None)
}
