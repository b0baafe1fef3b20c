//! Second-order checks at endpoints of one-dimensional strata, and the power-sum /
//! elementary-symmetric comparison on a shared fiber.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::poly::elementary;
use super::{RealizeConfig, SliceRealization};
use crate::comb::Composition;
use crate::error::{Error, Result};
use crate::poset::{annotate_min_max, build_poset, Extreme};

/// Bordered Hessian data of `L = P^μ_{s+1} − Σ a_i P^μ_i` at a constrained critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianCheck {
    pub x: Vec<f64>,
    pub mu: Composition,
    /// Lagrange multipliers `a_1, …, a_s`.
    pub multipliers: Vec<f64>,
    /// Sign of `(−1)^s det HL(x)`.
    pub det_sign: i8,
    /// Merged composition of `x` relative to `mu` (one part equal to 2).
    pub quotient: Composition,
    /// `+1` when the quotient is alternate even, `−1` when alternate odd.
    pub expected_sign: i8,
    pub consistent: bool,
    pub grad_residual: f64,
    /// Max entrywise gap between the finite-difference and assembled Hessians,
    /// relative to `max(1, max |HL|)`.
    pub fd_error: f64,
}

fn lagrangian(z: &[f64], mu: &[u32], s: usize) -> f64 {
    let (a, x) = z.split_at(s);
    x.iter()
        .zip(mu)
        .map(|(&xj, &m)| {
            let m = f64::from(m);
            let mut val = m * xj.powi(s as i32 + 1);
            for (i, ai) in a.iter().enumerate() {
                val -= ai * m * xj.powi(i as i32 + 1);
            }
            val
        })
        .sum()
}

fn fd_hessian(z: &[f64], mu: &[u32], s: usize, h: f64) -> DMatrix<f64> {
    let dim = z.len();
    let second = |p: usize, q: usize, h: f64| {
        let eval = |dp: f64, dq: f64| {
            let mut w = z.to_vec();
            w[p] += dp;
            w[q] += dq;
            lagrangian(&w, mu, s)
        };
        (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h)
    };
    DMatrix::from_fn(dim, dim, |p, q| (4.0 * second(p, q, h / 2.0) - second(p, q, h)) / 3.0)
}

/// Evaluates the bordered Hessian criterion at `x`, a weakly increasing `(s+1)`-tuple with
/// exactly one repeated adjacent pair, for the multiplicities `mu`.
pub fn hessian_sign(x: &[f64], mu: &Composition, s: usize) -> Result<HessianCheck> {
    let cfg = RealizeConfig::default();
    hessian_sign_with(x, mu, s, cfg.tol_sep, cfg.tol_grad)
}

pub fn hessian_sign_with(x: &[f64], mu: &Composition, s: usize, tol_sep: f64, tol_grad: f64) -> Result<HessianCheck> {
    if s == 0 || x.len() != s + 1 || mu.len() != s + 1 {
        return Err(Error::domain(format!("need s+1 = {} coordinates and parts", s + 1)));
    }
    if x.windows(2).any(|w| w[1] < w[0] - tol_sep) {
        return Err(Error::domain("coordinates must be weakly increasing"));
    }
    let repeated: Vec<usize> = (0..s).filter(|&k| x[k + 1] - x[k] <= tol_sep).collect();
    if repeated.len() != 1 {
        return Err(Error::domain(format!("expected one repeated adjacent pair, found {}", repeated.len())));
    }
    let k = repeated[0];
    let m: Vec<f64> = mu.parts().iter().map(|&p| f64::from(p)).collect();

    // ∇_x L = 0: Σ_i a_i i μ_j x_j^{i−1} = (s+1) μ_j x_j^s
    let a_mat = DMatrix::from_fn(s + 1, s, |j, i| (i + 1) as f64 * m[j] * x[j].powi(i as i32));
    let rhs = DVector::from_fn(s + 1, |j, _| (s + 1) as f64 * m[j] * x[j].powi(s as i32));
    let a = a_mat
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::domain(format!("multiplier solve failed: {e}")))?;
    let grad_residual = (&a_mat * &a - &rhs).amax() / rhs.amax().max(1.0);
    if grad_residual > tol_grad {
        return Err(Error::domain(format!("not a constrained critical point (gradient residual {grad_residual:.3e})")));
    }

    let dim = 2 * s + 1;
    let q_prime = |t: f64| {
        let mut v = (s + 1) as f64 * s as f64 * t.powi(s as i32 - 1);
        for i in 2..=s {
            v -= a[i - 1] * (i * (i - 1)) as f64 * t.powi(i as i32 - 2);
        }
        v
    };
    let mut hl = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..s {
        for j in 0..=s {
            let entry = -((i + 1) as f64) * m[j] * x[j].powi(i as i32);
            hl[(i, s + j)] = entry;
            hl[(s + j, i)] = entry;
        }
    }
    for j in 0..=s {
        hl[(s + j, s + j)] = m[j] * q_prime(x[j]);
    }

    let z: Vec<f64> = a.iter().chain(x).copied().collect();
    let step = 1e-3 * z.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let fd = fd_hessian(&z, mu.parts(), s, step);
    let fd_error = (&fd - &hl).amax() / hl.amax().max(1.0);

    let det = hl.clone().lu().determinant();
    let signed = if s.is_multiple_of(2) { det } else { -det };
    let det_sign = if signed > 0.0 {
        1
    } else if signed < 0.0 {
        -1
    } else {
        0
    };

    // the merged pair sits at position k (0-based) among the s distinct values
    let mut parts = vec![1u32; s];
    parts[k] = 2;
    let quotient = Composition::new(parts)?;
    let expected_sign = if quotient.is_alternate_even() { 1 } else { -1 };
    Ok(HessianCheck {
        x: x.to_vec(),
        mu: mu.clone(),
        multipliers: a.iter().copied().collect(),
        det_sign,
        consistent: det_sign == expected_sign,
        quotient,
        expected_sign,
        grad_residual,
        fd_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Min,
    Max,
}

/// An endpoint of a one-dimensional stratum, in normalized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumEndpoint {
    pub lambda: Composition,
    pub facet: Composition,
    pub role: Role,
    /// The facet's roots written in the `(s+1)`-coordinates of `lambda`.
    pub x: Vec<f64>,
}

/// Endpoints of every one-dimensional stratum of a generic realization.
pub fn stratum_endpoints(r: &SliceRealization) -> Result<Vec<StratumEndpoint>> {
    let poset = annotate_min_max(build_poset(&r.realized_facets, r.f.n as u32, r.s as u32)?);
    let mut out = Vec::new();
    for lambda in poset.level(r.s + 1) {
        let ann = poset.annotation(lambda).expect("annotated");
        for (extreme, role) in [(&ann.mu_min, Role::Min), (&ann.mu_max, Role::Max)] {
            let Extreme::Unique(facet) = extreme else { continue };
            let Some(v) = r.vertices_of(facet).next() else { continue };
            let q = crate::comb::quotient(facet, lambda)?;
            let mut x = Vec::with_capacity(r.s + 1);
            for (val, &rep) in v.u.iter().zip(q.parts()) {
                x.extend(std::iter::repeat_n(*val, rep as usize));
            }
            out.push(StratumEndpoint { lambda: lambda.clone(), facet: facet.clone(), role, x });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Duality {
    Agree,
    Tie,
    Disagree,
}

/// Compares `P_{s+1}(x) > P_{s+1}(y)` with `(−1)^{s+1} E_{s+1}(x) < (−1)^{s+1} E_{s+1}(y)`
/// for tuples sharing `E_1, …, E_s`.
pub fn power_elem_duality(x: &[f64], y: &[f64], s: usize) -> Result<Duality> {
    if x.len() != y.len() || s + 1 > x.len() {
        return Err(Error::domain("need tuples of equal length n > s"));
    }
    let ones = vec![1u32; x.len()];
    let ex = elementary(x, &ones, s + 1);
    let ey = elementary(y, &ones, s + 1);
    for i in 0..s {
        if (ex[i] - ey[i]).abs() > 1e-8 * ex[i].abs().max(1.0) {
            return Err(Error::domain(format!("E_{} differs: {} vs {}", i + 1, ex[i], ey[i])));
        }
    }
    let p = |v: &[f64]| v.iter().map(|t| t.powi(s as i32 + 1)).sum::<f64>();
    let (px, py) = (p(x), p(y));
    let sign = if (s + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let (qx, qy) = (sign * ex[s], sign * ey[s]);
    let tol = 1e-9 * px.abs().max(py.abs()).max(1.0);
    let dp = px - py;
    let dq = qx - qy;
    if dp.abs() <= tol && dq.abs() <= tol {
        return Ok(Duality::Tie);
    }
    Ok(if (dp > tol && dq < -tol) || (dp < -tol && dq > tol) { Duality::Agree } else { Duality::Disagree })
}

/// Gauss–Newton projection of `start` onto `{y : E_i(y) = E_i(x), i ≤ s}`.
pub fn fiber_pair(x: &[f64], start: &[f64], s: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let ones = vec![1u32; n];
    let target = elementary(x, &ones, s);
    let mut y = DVector::from_column_slice(start);
    for _ in 0..100 {
        let ey = elementary(y.as_slice(), &ones, s);
        let r = DVector::from_fn(s, |i, _| ey[i] - target[i]);
        if r.amax() < 1e-13 * (1.0 + target.iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
            return Some(y.iter().copied().collect());
        }
        // ∂e_i/∂y_k = e_{i−1}(y without y_k)
        let jac = DMatrix::from_fn(s, n, |i, k| {
            if i == 0 {
                return 1.0;
            }
            let rest: Vec<f64> = y.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| *v).collect();
            elementary(&rest, &vec![1; n - 1], i)[i - 1]
        });
        let jjt = &jac * jac.transpose();
        let w = jjt.lu().solve(&r)?;
        y -= jac.transpose() * w;
        if y.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{realize_slice, HyperbolicPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn endpoints_of_generic_example() {
        let g = HyperbolicPoly::from_coeffs(vec![0.0, -5.25, 1.0, 5.25, 0.0, -1.0]).unwrap();
        let r = realize_slice(&g, 3, &RealizeConfig::default()).unwrap();
        let ends = stratum_endpoints(&r).unwrap();
        assert!(!ends.is_empty());
        for e in ends {
            let h = hessian_sign(&e.x, &e.lambda, 3).unwrap();
            assert!(h.consistent, "{h:?}");
            assert!(h.fd_error <= 1e-6, "{h:?}");
            assert_eq!(h.det_sign == 1, e.role == Role::Max);
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(hessian_sign(&[0.0, 1.0, 2.0], &c(&[1, 1, 1]), 2).is_err());
        assert!(hessian_sign(&[0.0, 0.0, 0.0], &c(&[1, 1, 1]), 2).is_err());
    }

    #[test]
    fn duality_on_fibers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agree = 0;
        for _ in 0..50 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let start: Vec<f64> = x.iter().map(|v| v + rng.gen_range(-0.3..0.3)).collect();
            let Some(y) = fiber_pair(&x, &start, 2) else { continue };
            let d = power_elem_duality(&x, &y, 2).unwrap();
            assert_ne!(d, Duality::Disagree);
            agree += usize::from(d == Duality::Agree);
        }
        assert!(agree > 30);
        assert_eq!(power_elem_duality(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 1).unwrap(), Duality::Tie);
        assert!(power_elem_duality(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0], 1).is_err());
    }
}
