use mixedvol::bodies::{self, ConvexPolytope};
use mixedvol::functionals::{
    circumradius, mixed_volume_1, mixed_volume_oracle, surface_area, v1, v1_quadrature, V1Options,
};
use mixedvol::oracle::{meb_exhaustive, mc_v1};
use mixedvol::rng::split_seed;
use proptest::prelude::*;

fn body(n: usize, seed: u64) -> ConvexPolytope {
    bodies::random_polytope(n, n + 2 + (seed % 7) as usize, seed).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn minkowski_linearity(n in 2usize..5, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (k1, k2, m) = (body(n, a), body(n, b), body(n, c));
        let lhs = mixed_volume_1(&k1.minkowski_sum(&k2).unwrap(), &m).unwrap();
        let rhs = mixed_volume_1(&k1, &m).unwrap() + mixed_volume_1(&k2, &m).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-9);
    }

    #[test]
    fn scaling(n in 2usize..5, a in any::<u64>(), b in any::<u64>(), lam in 0.1f64..10.0) {
        let (k, m) = (body(n, a), body(n, b));
        let lk = k.scale(lam).unwrap();
        prop_assert!(rel(mixed_volume_1(&lk, &m).unwrap(), lam * mixed_volume_1(&k, &m).unwrap()) <= 1e-10);
        prop_assert!(rel(surface_area(&lk).unwrap(), lam.powi(n as i32 - 1) * surface_area(&k).unwrap()) <= 1e-10);
        if n <= 3 {
            prop_assert!(rel(v1(&lk).unwrap(), lam * v1(&k).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn monotonicity(n in 2usize..4, a in any::<u64>(), b in any::<u64>()) {
        let (k, m) = (body(n, a), body(n, b));
        // K' = conv(K, extra points) contains K
        let mut pts = k.vertices().to_vec();
        pts.extend(body(n, a ^ 0xff).vertices().iter().cloned());
        let big = ConvexPolytope::new(n, pts).unwrap();
        prop_assert!(mixed_volume_1(&k, &m).unwrap() <= mixed_volume_1(&big, &m).unwrap() + 1e-12);
    }

    #[test]
    fn linhart_invariant(n in 2usize..4, seed in any::<u64>()) {
        let p = body(n, seed);
        let lhs = v1(&p).unwrap();
        let r = circumradius(&p);
        prop_assert!(lhs >= 2.0 * r - 1e-9);
        prop_assert!(lhs - 2.0 * r > 1e-9, "full-dimensional body at equality");
    }
}

#[test]
fn oracle_agreement() {
    for i in 0..60u64 {
        let n = 2 + (i % 2) as usize;
        let k = body(n, split_seed(5, 2 * i));
        let m = body(n, split_seed(5, 2 * i + 1));
        let fast = mixed_volume_1(&k, &m).unwrap();
        let slow = mixed_volume_oracle(&k, &m).unwrap();
        assert!(rel(fast, slow) <= 1e-7, "{fast} vs {slow}");
        let (_, r) = meb_exhaustive(k.vertices());
        assert!((circumradius(&k) - r).abs() <= 1e-9);
    }
}

#[test]
fn v1_edge_formula_vs_quadrature() {
    let opts = V1Options::default();
    for i in 0..50u64 {
        let p = body(3, split_seed(11, i));
        let exact = v1(&p).unwrap();
        let q = v1_quadrature(&p, &opts).unwrap();
        assert!(rel(q.value, exact) <= 1e-4, "{} vs {exact}", q.value);
    }
}

#[test]
fn v1_vs_monte_carlo() {
    for (i, p) in [
        bodies::box_body(&[1.0, 1.0, 1.0]).unwrap(),
        bodies::regular_polygon(256).unwrap(),
        bodies::simplex_regular(3).unwrap(),
        body(3, 77),
    ]
    .iter()
    .enumerate()
    {
        let est = mc_v1(p, 100_000, i as u64).unwrap();
        assert!((v1(p).unwrap() - est.value).abs() <= 4.0 * est.std_error);
    }
}

#[test]
fn segments_attain_linhart_equality() {
    for n in 1..=5 {
        let seg = bodies::segment(&mixedvol::Direction::axis(n, n - 1), 3.0).unwrap();
        assert!((v1(&seg).unwrap() - 2.0 * circumradius(&seg)).abs() <= 1e-9);
    }
}
