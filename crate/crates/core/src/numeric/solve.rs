//! Damped Newton iteration for weighted power-sum systems `Σ_j m_j x_j^i = q_i`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Solves the first `x0.len()` equations of the system; `None` on divergence or stall.
pub(crate) fn newton_power_sums(x0: &[f64], mult: &[u32], q: &[f64], bound: f64, max_iter: usize) -> Option<Vec<f64>> {
    let l = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let scale = 1.0 + q[..l].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let residual = |x: &DVector<f64>| -> DVector<f64> {
        DVector::from_fn(l, |i, _| {
            let k = i as i32 + 1;
            x.iter().zip(mult).map(|(&v, &m)| f64::from(m) * v.powi(k)).sum::<f64>() - q[i]
        })
    };
    let mut r = residual(&x);
    let mut norm = r.amax();
    for _ in 0..max_iter {
        if norm <= 1e-14 * scale {
            break;
        }
        let jac = DMatrix::from_fn(l, l, |i, j| (i + 1) as f64 * f64::from(mult[j]) * x[j].powi(i as i32));
        let step = jac.lu().solve(&r)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = &x - &step * t;
            let rc = residual(&cand);
            let nc = rc.amax();
            if nc.is_finite() && nc < norm {
                x = cand;
                r = rc;
                norm = nc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || x.amax() > bound {
            break;
        }
    }
    (norm <= 1e-10 * scale && x.iter().all(|v| v.is_finite())).then(|| x.iter().copied().collect())
}

/// Weighted means of consecutive root blocks of sizes `mult`.
pub(crate) fn cluster_seed(roots: &[f64], mult: &[u32]) -> Option<Vec<f64>> {
    if mult.iter().map(|&m| m as usize).sum::<usize>() != roots.len() {
        return None;
    }
    let mut out = Vec::with_capacity(mult.len());
    let mut at = 0;
    for &m in mult {
        let m = m as usize;
        out.push(roots[at..at + m].iter().sum::<f64>() / m as f64);
        at += m;
    }
    Some(out)
}

pub(crate) fn random_seed(rng: &mut impl Rng, l: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..l).map(|_| rng.gen_range(lo..=hi)).collect();
    v.sort_by(f64::total_cmp);
    v
}
