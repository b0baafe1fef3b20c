//! WebAssembly entry points for the browser demo in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string, so the page
//! needs no generated bindings beyond the function names. The same functions are
//! ordinary Rust on native targets, which is how they are tested.

use serde::Serialize;
use serde_json::json;

use hyperstrata::bounds::{bound_report, BoundReport};
use hyperstrata::covering::enumerate_potential;
use hyperstrata::numeric::{realize_slice, verify_min_max, HyperbolicPoly, RealizeConfig};
use hyperstrata::poset::analyze;
use hyperstrata::Composition;

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::*;

/// Largest `n` the page accepts; keeps a click under a second.
pub const MAX_N: u32 = 8;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn check_n(n: u32) -> Result<(), String> {
    if n > MAX_N {
        return Err(format!("the demo is limited to n <= {MAX_N}; use the CLI for larger cases"));
    }
    Ok(())
}

#[derive(Serialize)]
struct FamilyEntry {
    facets: Vec<Composition>,
    f: Vec<u64>,
    h: Vec<i64>,
    shelling: Vec<Composition>,
}

/// Potential posets for `(n, s)` with their f- and h-vectors.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn potential_posets(n: u32, s: u32, up_to_reversal: bool) -> Result<String, String> {
    check_n(n)?;
    let family = enumerate_potential(n, s, up_to_reversal).map_err(|e| e.to_string())?;
    let entries = family
        .iter()
        .map(|facets| {
            let (_, r) = analyze(facets, n, s).map_err(|e| e.to_string())?;
            Ok(FamilyEntry { facets: r.facets, f: r.f, h: r.h, shelling: r.shelling })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(to_json(&json!({ "n": n, "s": s, "up_to_reversal": up_to_reversal, "count": entries.len(), "sets": entries })))
}

/// Bound reports for every `2 <= s < n` with `n` in `n_min..=n_max`.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn bounds_table(n_min: u32, n_max: u32) -> Result<String, String> {
    if n_max > 30 {
        return Err("n_max must be at most 30".into());
    }
    let rows: Vec<BoundReport> = (n_min.max(3)..=n_max)
        .flat_map(|n| (2..n).map(move |s| (n, s)))
        .map(|(n, s)| bound_report(n, s).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok(to_json(&rows))
}

/// Realizes `H_s(F)` for `F` given by comma- or space-separated roots.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn realize_from_roots(roots: &str, s: usize, seed: u64) -> Result<String, String> {
    let roots: Vec<f64> = roots
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: {t}")))
        .collect::<Result<_, _>>()?;
    check_n(roots.len() as u32)?;
    let f = HyperbolicPoly::from_roots(roots).map_err(|e| e.to_string())?;
    let cfg = RealizeConfig { starts_per_dim: 60, seed, ..Default::default() };
    let r = realize_slice(&f, s, &cfg).map_err(|e| e.to_string())?;
    let min_max = if r.generic && s >= 2 { verify_min_max(&r).ok() } else { None };
    Ok(to_json(&json!({ "realization": r, "min_max": min_max })))
}
