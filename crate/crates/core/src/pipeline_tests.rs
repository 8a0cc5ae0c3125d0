use crate::adelic::{adelic_ball_series, adelic_ball_volume, global_height, prediction_n};
use crate::archimedean::{archimedean_height, ball_volume_numeric};
use crate::arith::{factorize, primes_up_to};
use crate::building::{
    building_distance, enumerate_classes, sphere_counts, sphere_size, vertex_sphere_size, BuildingParams,
};
use crate::counting::{pi_count, GroupElementQ};
use crate::dirichlet::{coeff_d, coeff_sieve, l_closed_pgl2, l_euler, partial_sum};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;

#[test]
fn vertex_spheres_agree_with_enumeration() {
    for (d, p, k) in [(2, 2, 5), (2, 7, 3), (3, 2, 2), (3, 3, 2), (4, 2, 1)] {
        let params = BuildingParams::new(d, p).unwrap();
        let classes = enumerate_classes(params, k).unwrap();
        let counts = sphere_counts(&classes, k);
        for (j, &c) in counts.iter().enumerate() {
            assert_eq!(vertex_sphere_size(params, j as u32), BigUint::from(c), "d={d} p={p} k={j}");
        }
    }
}

#[test]
fn enumerated_distance_matches_smith_form() {
    let params = BuildingParams::new(3, 2).unwrap();
    for c in enumerate_classes(params, 2).unwrap() {
        let dist = building_distance(c.class.hnf(), 2).unwrap();
        assert_eq!(dist, c.distance);
        assert_eq!(c.snf.distance(), c.distance);
    }
}

#[test]
fn sieve_is_multiplicative_over_prime_powers() {
    let table = coeff_sieve(3, 2000).unwrap();
    for m in 1..=2000u64 {
        let product = factorize(m)
            .unwrap()
            .into_iter()
            .map(|(p, e)| sphere_size(BuildingParams::new(3, p).unwrap(), e))
            .fold(BigUint::from(1u32), |acc, x| acc * x);
        assert_eq!(table.get(m).unwrap(), &product, "m={m}");
        assert_eq!(coeff_d(3, m).unwrap(), product);
    }
}

#[test]
fn euler_product_against_partial_sums() {
    let s = 4.0;
    let euler = l_euler(2, Complex64::new(s, 0.0), 100_000).unwrap().value.re;
    let partial = partial_sum(2, s, 1_000_000).unwrap();
    assert!(partial < euler);
    assert!(euler - partial < 1e-10);
    let closed = l_closed_pgl2(Complex64::new(s, 0.0)).unwrap().re;
    assert!((euler / closed - 1.0).abs() < 1e-12);
}

#[test]
fn global_height_factors_into_local_heights() {
    let m = vec![vec![3i64, 1], vec![2, 8]];
    let profile = global_height(&m, 1.5).unwrap();
    let det = 22u64;
    let mut h_fin = 1.0;
    for p in primes_up_to(det) {
        let k = building_distance(&m, p).unwrap();
        h_fin *= (p as f64).powi(k as i32);
    }
    assert_eq!(profile.h_fin.to_f64().unwrap(), h_fin);
    let mf: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let h_inf = archimedean_height(&mf, 1.5).unwrap().height;
    assert!((profile.h - h_fin * h_inf).abs() < 1e-10 * profile.h);
}

#[test]
fn counting_height_agrees_with_global_height() {
    for m in [[[1, 0], [0, 1]], [[2, 1], [1, 3]], [[4, -6], [2, 9]], [[0, 5], [-3, 7]]] {
        let g = GroupElementQ::new(m).unwrap();
        let fast = g.height(1.0);
        let full = global_height(&g.rows(), 1.0).unwrap().h;
        assert!((fast - full).abs() < 1e-10 * full, "{m:?}: {fast} vs {full}");
    }
}

#[test]
fn adelic_volume_starts_with_archimedean_term() {
    let t = 0.6;
    let direct = adelic_ball_volume(2, 1.0, t).unwrap();
    assert!((direct / ball_volume_numeric(2, 1.0, t, 4).unwrap() - 1.0).abs() < 1e-5);
    let series = adelic_ball_series(2, 1.0, 3.0, 0.5, 1_000_000).unwrap();
    for (&tt, &v) in series.t_grid.iter().zip(&series.values) {
        let d = adelic_ball_volume(2, 1.0, tt).unwrap();
        assert!((v - d).abs() <= 1e-9 * d.max(1.0), "T={tt}");
    }
}

#[test]
fn pi_at_four_and_convention_ordering() {
    let counts = pi_count(4.0, 1.0).unwrap();
    assert_eq!(counts.counts, vec![160]);
    let prediction = prediction_n(2, 3.0, 4f64.ln(), 1.0).unwrap();
    assert!(prediction.conventions[1].value > prediction.conventions[0].value);
}
