use hyperstrata::bounds::{f0_bound, ubt_check};
use hyperstrata::numeric::{
    coeffs_from_multiset, coeffs_from_roots, elementary_from_power_sums, fiber_pair, hessian_sign, power_elem_duality,
    power_sums_from_coeffs, random_integer_roots, realize_slice, stratum_endpoints, verify_min_max, Duality,
    HyperbolicPoly, RealizeConfig, Role,
};
use hyperstrata::poset::{analyze, is_potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `e_k` by summing products over all k-subsets.
fn elementary_by_subsets(roots: &[f64], k: usize) -> f64 {
    let n = roots.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| roots[i]).product::<f64>())
        .sum()
}

fn separated_roots(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut r: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        r.sort_by(f64::total_cmp);
        if r.windows(2).all(|w| w[1] - w[0] > 0.15) {
            return r;
        }
    }
}

#[test]
fn vieta_round_trip_on_random_root_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let n = 1 + trial % 8;
        let roots = separated_roots(&mut rng, n);
        let coeffs = coeffs_from_roots(&roots);
        for (k, &h) in coeffs.iter().enumerate() {
            let e = elementary_by_subsets(&roots, k + 1);
            let expected = if (k + 1) % 2 == 0 { e } else { -e };
            assert!((h - expected).abs() <= 1e-9 * (1.0 + e.abs()), "H_{} for {roots:?}", k + 1);
        }
        let p = power_sums_from_coeffs(&coeffs, n);
        for (i, &pi) in p.iter().enumerate() {
            let direct: f64 = roots.iter().map(|r| r.powi(i as i32 + 1)).sum();
            assert!((pi - direct).abs() <= 1e-8 * (1.0 + direct.abs()));
        }
        let e = elementary_from_power_sums(&p);
        for (k, &ek) in e.iter().enumerate() {
            let direct = elementary_by_subsets(&roots, k + 1);
            assert!((ek - direct).abs() <= 1e-7 * (1.0 + direct.abs()));
        }
        let f = HyperbolicPoly::from_coeffs(coeffs).unwrap();
        assert!(f.is_hyperbolic().unwrap());
        let back = f.real_roots();
        assert_eq!(back.len(), n);
        for (a, b) in back.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-7, "{roots:?} -> {back:?}");
        }
    }
}

#[test]
fn power_and_elementary_orders_are_dual_on_fibers() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut pairs, mut agree) = (0, 0);
    while pairs < 1000 {
        let n = rng.gen_range(3..=7);
        let s = rng.gen_range(1..n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let start: Vec<f64> = x.iter().map(|v| v + rng.gen_range(-0.4..0.4)).collect();
        let Some(y) = fiber_pair(&x, &start, s) else { continue };
        pairs += 1;
        let d = power_elem_duality(&x, &y, s).unwrap();
        assert_ne!(d, Duality::Disagree, "x={x:?} y={y:?} s={s}");
        agree += usize::from(d == Duality::Agree);
    }
    assert!(agree > 900, "only {agree} strict comparisons");
}

#[test]
fn realized_slices_agree_with_the_combinatorics() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut generic = 0;
    for trial in 0..12 {
        let n = 4 + trial % 3;
        let s = 2 + trial % (n - 2);
        let roots = random_integer_roots(&mut rng, n, 3 * n as i64);
        let f = HyperbolicPoly::from_roots(roots.clone()).unwrap();
        let r = realize_slice(&f, s, &RealizeConfig { seed: trial as u64, ..Default::default() }).unwrap();
        let target = f.full_coeffs();
        for v in r.vertices.iter().chain(&r.degenerate) {
            let c = coeffs_from_multiset(&v.x, v.composition.parts());
            for i in 0..s {
                let scale = 1.0 + target[i + 1].abs();
                assert!((c[i] - target[i + 1]).abs() <= 1e-6 * scale, "H_{} at {} for {roots:?}", i + 1, v.composition);
            }
        }
        if !r.generic {
            continue;
        }
        generic += 1;
        let (n32, s32) = (n as u32, s as u32);
        assert!(is_potential(&r.realized_facets, n32, s32).unwrap().0);
        let (_, report) = analyze(&r.realized_facets, n32, s32).unwrap();
        assert!(report.shelling_verified && report.reverse_shelling_verified);
        assert!(ubt_check(&report.f, n32, s32).unwrap().iter().all(|&b| b));
        assert!(r.vertices.len() as u64 <= f0_bound(n32, s32).unwrap());
        assert!(verify_min_max(&r).unwrap().passed);
        for e in stratum_endpoints(&r).unwrap() {
            let hc = hessian_sign(&e.x, &e.lambda, s).unwrap();
            assert!(hc.consistent && hc.fd_error <= 1e-6, "{hc:?}");
            assert_eq!(hc.det_sign == 1, e.role == Role::Max);
        }
    }
    assert!(generic >= 8);
}
