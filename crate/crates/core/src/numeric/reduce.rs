//! Reduction of symmetric systems, written in the elementary-symmetric basis, to the
//! orbit types of a Vandermonde covering.

use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comb::Partition;
use crate::error::{Error, Result};

/// Exact multivariate polynomial; exponent vectors map to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl QPolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.add_term(d, c * BigRational::from_integer(BigInt::from(e[i])));
            }
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&k, v) in e.iter().zip(x) {
                for _ in 0..k {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Term list with variables named `{prefix}1`, `{prefix}2`, ….
    pub fn to_terms(&self, prefix: &str) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(e, c)| Term {
                coef: c.to_string(),
                monomial: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (format!("{prefix}{}", i + 1), k))
                    .collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coef: String,
    #[serde(default)]
    pub monomial: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<Term>,
}

/// A system file: a bare list of polynomials or `{"system": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SystemInput {
    List(Vec<PolyJson>),
    Wrapped { system: Vec<PolyJson> },
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(Error::Parse(format!("bad coefficient `{text}`")));
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        let num = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad coefficient `{text}`")))?;
        let den = num::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    BigRational::from_str(t).map_err(|_| Error::Parse(format!("bad coefficient `{text}`")))
}

fn z_index(name: &str) -> Result<usize> {
    name.strip_prefix('Z')
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` (expected Z1, Z2, …)")))
}

/// Parses a system over `Z_1, …, Z_m`; returns the polynomials in `m` variables.
pub fn parse_system(text: &str) -> Result<Vec<QPolynomial>> {
    let input: SystemInput = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let polys = match input {
        SystemInput::List(p) | SystemInput::Wrapped { system: p } => p,
    };
    if polys.is_empty() {
        return Err(Error::Parse("empty system".into()));
    }
    let mut m = 0;
    for p in &polys {
        for t in &p.terms {
            for name in t.monomial.keys() {
                m = m.max(z_index(name)?);
            }
        }
    }
    polys
        .iter()
        .map(|p| {
            let mut out = QPolynomial::zero(m);
            for t in &p.terms {
                let mut e = vec![0; m];
                for (name, &k) in &t.monomial {
                    e[z_index(name)? - 1] += k;
                }
                out.add_term(e, parse_rational(&t.coef)?);
            }
            Ok(out)
        })
        .collect()
}

/// `E_1^q, …, E_k^q`: elementary symmetric polynomials of the multiset with `x_j`
/// repeated `q_j` times, as polynomials in `ℓ(q)` variables.
pub fn elementary_under(q: &Partition, k: usize) -> Vec<QPolynomial> {
    let l = q.len();
    // coefficients of ∏_j (1 + x_j t)^{q_j}, indexed by the power of t
    let mut gen = vec![QPolynomial::constant(l, BigRational::one())];
    for (j, &m) in q.parts().iter().enumerate() {
        let xj = QPolynomial::var(l, j);
        for _ in 0..m {
            let mut next = gen.clone();
            next.push(QPolynomial::zero(l));
            for (i, c) in gen.iter().enumerate() {
                next[i + 1] = next[i + 1].add(&c.mul(&xj));
            }
            gen = next;
        }
    }
    (1..=k).map(|i| gen.get(i).cloned().unwrap_or_else(|| QPolynomial::zero(l))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedSystem {
    pub partition: Partition,
    pub variables: Vec<String>,
    pub polynomials: Vec<PolyJson>,
    /// A real common root, when the multistart solver found one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<f64>>,
    #[serde(skip)]
    pub exact: Vec<QPolynomial>,
}

fn substitute(p: &QPolynomial, e: &[QPolynomial], l: usize) -> QPolynomial {
    let mut out = QPolynomial::zero(l);
    for (exps, c) in p.terms() {
        let mut term = QPolynomial::constant(l, c.clone());
        for (i, &k) in exps.iter().enumerate() {
            if k > 0 {
                term = term.mul(&e[i].pow(k));
            }
        }
        out = out.add(&term);
    }
    out
}

/// Levenberg–Marquardt multistart on the sum of squares; accepts residual ≤ 1e-9.
fn certify(system: &[QPolynomial], l: usize, seed: u64, starts: usize) -> Option<Vec<f64>> {
    let grads: Vec<Vec<QPolynomial>> = system.iter().map(|p| (0..l).map(|i| p.derivative(i)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let resid = |x: &[f64]| DVector::from_iterator(system.len(), system.iter().map(|p| p.eval_f64(x)));
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..l).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut r = resid(&x);
        let mut lambda = 1e-3;
        for _ in 0..200 {
            if r.amax() <= 1e-12 {
                break;
            }
            let jac = DMatrix::from_fn(system.len(), l, |k, i| grads[k][i].eval_f64(&x));
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &r;
            let a = &jtj + DMatrix::identity(l, l) * lambda;
            let Some(step) = a.lu().solve(&g) else { break };
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(v, d)| v - d).collect();
            let rc = resid(&cand);
            if rc.norm() < r.norm() {
                x = cand;
                r = rc;
                lambda = (lambda * 0.3).max(1e-15);
            } else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
        if r.amax() <= 1e-9 && x.iter().all(|v| v.is_finite()) {
            return Some(x);
        }
    }
    None
}

/// Substitutes `Z_i ↦ E_i^q` for every `q` in `partitions`.
///
/// With `certify_seed` set, each reduced system is also searched for a real root.
pub fn reduce_symmetric(
    system: &[QPolynomial],
    n: u32,
    partitions: &[Partition],
    certify_seed: Option<u64>,
) -> Result<Vec<ReducedSystem>> {
    let m = system.iter().map(QPolynomial::nvars).max().unwrap_or(0);
    partitions
        .iter()
        .map(|q| {
            if q.n() != n {
                return Err(Error::domain(format!("{q} is not a partition of {n}")));
            }
            let l = q.len();
            let e = elementary_under(q, m);
            let exact: Vec<QPolynomial> = system
                .iter()
                .map(|p| {
                    let mut padded = QPolynomial::zero(m);
                    for (exps, c) in p.terms() {
                        let mut full = exps.clone();
                        full.resize(m, 0);
                        padded.add_term(full, c.clone());
                    }
                    substitute(&padded, &e, l)
                })
                .collect();
            let certificate = certify_seed.and_then(|seed| certify(&exact, l, seed, 50 * l.max(1)));
            Ok(ReducedSystem {
                partition: q.clone(),
                variables: (1..=l).map(|i| format!("x{i}")).collect(),
                polynomials: exact.iter().map(|p| PolyJson { terms: p.to_terms("x") }).collect(),
                certificate,
                exact,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn first_elementary_under_three() {
        let sys = parse_system(r#"[{"terms":[{"coef":"1","monomial":{"Z1":1}}]}]"#).unwrap();
        let out = reduce_symmetric(&sys, 3, &[p(&[3])], None).unwrap();
        assert_eq!(out[0].polynomials[0].terms, vec![Term { coef: "3".into(), monomial: [("x1".into(), 1)].into() }]);
    }

    #[test]
    fn second_elementary_matches_direct_expansion() {
        let sys = parse_system(
            r#"{"system":[{"terms":[{"coef":"1","monomial":{"Z1":1}}]},
                          {"terms":[{"coef":"1","monomial":{"Z2":1}},{"coef":"1","monomial":{}}]}]}"#,
        )
        .unwrap();
        let out = reduce_symmetric(&sys, 4, &[p(&[2, 1, 1])], None).unwrap();
        let red = &out[0].exact;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<BigRational> = (0..3).map(|_| rat(rng.gen_range(-9..9), rng.gen_range(1..5))).collect();
            let full = [x[0].clone(), x[0].clone(), x[1].clone(), x[2].clone()];
            let e1: BigRational = full.iter().cloned().sum();
            let mut e2 = BigRational::zero();
            for i in 0..4 {
                for j in i + 1..4 {
                    e2 += &full[i] * &full[j];
                }
            }
            assert_eq!(red[0].eval_exact(&x), e1);
            assert_eq!(red[1].eval_exact(&x), e2 + BigRational::one());
        }
    }

    #[test]
    fn certificate_for_a_known_root() {
        // roots (1,1,2): E1 = 4, E2 = 5
        let sys = parse_system(
            r#"[{"terms":[{"coef":"1","monomial":{"Z1":1}},{"coef":"-4"}]},
                {"terms":[{"coef":"1","monomial":{"Z2":1}},{"coef":"-5"}]}]"#,
        )
        .unwrap();
        let out = reduce_symmetric(&sys, 3, &[p(&[2, 1])], Some(1)).unwrap();
        let x = out[0].certificate.as_ref().expect("root with two distinct values");
        assert!((2.0 * x[0] + x[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_system("[]"), Err(Error::Parse(_))));
        assert!(matches!(parse_system(r#"[{"terms":[{"coef":"x","monomial":{}}]}]"#), Err(Error::Parse(_))));
        assert!(matches!(parse_system(r#"[{"terms":[{"coef":"1","monomial":{"Y1":1}}]}]"#), Err(Error::Parse(_))));
        assert_eq!(parse_rational("-2.25").unwrap(), rat(-9, 4));
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
    }
}
