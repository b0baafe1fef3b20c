//! Monic real polynomials, Vieta expansions and exact Sturm counting.

use nalgebra::DMatrix;
use num::{BigRational, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum coefficient mismatch between supplied roots and coefficients.
pub const TOL_COEFF: f64 = 1e-8;

/// `T^n + H_1 T^{n-1} + … + H_n`, optionally with its real roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoly {
    pub n: usize,
    /// `(H_1, …, H_n)`.
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<f64>>,
}

/// Accepted JSON inputs: `{"n":6,"coeffs":[…]}` or `{"roots":[…]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolyInput {
    Coeffs { n: usize, coeffs: Vec<f64> },
    Roots { roots: Vec<f64> },
}

impl HyperbolicPoly {
    /// Validates hyperbolicity with an exact Sturm count.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("polynomial of degree 0"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite coefficient"));
        }
        let poly = Self { n: coeffs.len(), coeffs, roots: None };
        if !poly.is_hyperbolic()? {
            return Err(Error::domain("polynomial has non-real roots"));
        }
        Ok(poly)
    }

    pub fn from_roots(mut roots: Vec<f64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::domain("empty root list"));
        }
        if roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::domain("non-finite root"));
        }
        roots.sort_by(f64::total_cmp);
        let coeffs = coeffs_from_roots(&roots);
        Ok(Self { n: roots.len(), coeffs, roots: Some(roots) })
    }

    pub fn from_input(input: PolyInput) -> Result<Self> {
        match input {
            PolyInput::Coeffs { n, coeffs } => {
                if n != coeffs.len() {
                    return Err(Error::Parse(format!("n = {n} but {} coefficients given", coeffs.len())));
                }
                Self::from_coeffs(coeffs)
            }
            PolyInput::Roots { roots } => Self::from_roots(roots),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let input: PolyInput = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_input(input)
    }

    /// Full descending coefficient vector `[1, H_1, …, H_n]`.
    pub fn full_coeffs(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.coeffs.iter().copied()).collect()
    }

    /// All roots are real, counted with multiplicity.
    pub fn is_hyperbolic(&self) -> Result<bool> {
        Ok(real_root_count_with_multiplicity(&self.full_coeffs())? == self.n)
    }

    /// Sorted real roots: supplied ones, or companion eigenvalues polished by Newton steps.
    pub fn real_roots(&self) -> Vec<f64> {
        if let Some(r) = &self.roots {
            return r.clone();
        }
        let n = self.n;
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            companion[(0, j)] = -self.coeffs[j];
        }
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        let full = self.full_coeffs();
        let mut roots: Vec<f64> = companion.complex_eigenvalues().iter().map(|z| z.re).collect();
        for r in roots.iter_mut() {
            for _ in 0..3 {
                let (v, d) = horner_with_derivative(&full, *r);
                if d.abs() < 1e-300 {
                    break;
                }
                let step = v / d;
                if !step.is_finite() || step.abs() > 1e-3 * (1.0 + r.abs()) {
                    break;
                }
                *r -= step;
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    /// Power sums `p_1, …, p_k` of the roots, from the coefficients.
    pub fn power_sums(&self, k: usize) -> Vec<f64> {
        power_sums_from_coeffs(&self.coeffs, k)
    }
}

/// `H_i = (−1)^i e_i(roots)`.
pub fn coeffs_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        c.push(0.0);
        for i in (1..c.len()).rev() {
            c[i] -= r * c[i - 1];
        }
    }
    c.remove(0);
    c
}

/// Coefficients of `∏ (T − x_j)^{m_j}`, without the leading 1.
pub fn coeffs_from_multiset(x: &[f64], mult: &[u32]) -> Vec<f64> {
    let roots: Vec<f64> = x.iter().zip(mult).flat_map(|(&v, &m)| std::iter::repeat_n(v, m as usize)).collect();
    coeffs_from_roots(&roots)
}

/// Newton identities: power sums from `H_1, …, H_n`.
pub fn power_sums_from_coeffs(coeffs: &[f64], k: usize) -> Vec<f64> {
    let e = |i: usize| if i == 0 { 1.0 } else if i <= coeffs.len() { if i.is_multiple_of(2) { coeffs[i - 1] } else { -coeffs[i - 1] } } else { 0.0 };
    let mut p = vec![0.0; k + 1];
    for j in 1..=k {
        let mut acc = if j % 2 == 1 { j as f64 * e(j) } else { -(j as f64) * e(j) };
        for i in 1..j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e(i) * p[j - i];
        }
        p[j] = acc;
    }
    p.remove(0);
    p
}

/// Newton identities: `e_1, …, e_k` from power sums `p_1, …, p_k`.
pub fn elementary_from_power_sums(p: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for k in 1..=p.len() {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * p[i - 1];
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    e
}

/// Elementary symmetric polynomials `e_1, …, e_k` of a multiset.
pub fn elementary(x: &[f64], mult: &[u32], k: usize) -> Vec<f64> {
    let c = coeffs_from_multiset(x, mult);
    (1..=k).map(|i| if i <= c.len() { if i % 2 == 0 { c[i - 1] } else { -c[i - 1] } } else { 0.0 }).collect()
}

/// Weighted power sums `Σ m_j x_j^i` for `i = 1..=k`.
pub fn weighted_power_sums(x: &[f64], mult: &[u32], k: usize) -> Vec<f64> {
    (1..=k as i32).map(|i| x.iter().zip(mult).map(|(&v, &m)| f64::from(m) * v.powi(i)).sum()).collect()
}

fn horner_with_derivative(full: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &c in full {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

type QPoly = Vec<BigRational>;

fn to_rational(descending: &[f64]) -> Result<QPoly> {
    let mut out: QPoly = descending
        .iter()
        .map(|&c| BigRational::from_float(c).ok_or_else(|| Error::domain("non-finite coefficient")))
        .collect::<Result<_>>()?;
    out.reverse();
    Ok(out)
}

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn derivative(p: &QPoly) -> QPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect()
}

fn rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b.last().expect("nonzero divisor");
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r.last().expect("nonempty") / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &q * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn distinct_real_roots(p: &QPoly) -> usize {
    if p.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p.clone(), derivative(p)];
    loop {
        let k = seq.len();
        if seq[k - 1].is_empty() {
            seq.pop();
            break;
        }
        let mut r = rem(&seq[k - 2], &seq[k - 1]);
        if r.is_empty() {
            break;
        }
        for c in r.iter_mut() {
            *c = -c.clone();
        }
        seq.push(r);
    }
    let sign = |c: &BigRational| if c.is_positive() { 1i8 } else if c.is_negative() { -1 } else { 0 };
    let at_pos = sign_changes(seq.iter().map(|q| sign(q.last().expect("nonzero"))));
    let at_neg = sign_changes(seq.iter().map(|q| {
        let s = sign(q.last().expect("nonzero"));
        if (q.len() - 1) % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    at_neg - at_pos
}

/// Number of distinct real roots of the polynomial with descending coefficients
/// `coeffs`; exact, since every finite `f64` is a rational number.
pub fn sturm_real_root_count(coeffs: &[f64]) -> Result<usize> {
    if coeffs.first().is_none_or(|&c| c == 0.0) {
        return Err(Error::domain("zero leading coefficient"));
    }
    let mut p = to_rational(coeffs)?;
    trim(&mut p);
    Ok(distinct_real_roots(&p))
}

/// Real roots counted with multiplicity: a root of multiplicity `m` is a distinct root
/// of each of `p, gcd(p, p'), …` up to the `m`-th term.
pub fn real_root_count_with_multiplicity(coeffs: &[f64]) -> Result<usize> {
    if coeffs.first().is_none_or(|&c| c == 0.0) {
        return Err(Error::domain("zero leading coefficient"));
    }
    let mut p = to_rational(coeffs)?;
    trim(&mut p);
    let mut total = 0;
    while p.len() > 1 {
        total += distinct_real_roots(&p);
        p = gcd(&p, &derivative(&p));
    }
    Ok(total)
}
