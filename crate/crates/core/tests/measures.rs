use mixedvol::bodies::{self, ConvexPolytope};
use mixedvol::functionals::{v_nminus1, volume};
use mixedvol::measures::surface_area_measure;
use mixedvol::rng::split_seed;
use mixedvol::spherical::sample_sphere;
use mixedvol::Direction;

fn cases() -> Vec<(ConvexPolytope, Direction)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for i in 0..50u64 {
            let s = split_seed(0xabc, 100 * n as u64 + i);
            let p = bodies::random_polytope(n, n + 2 + (s % 8) as usize, s).unwrap();
            let e = Direction::new(sample_sphere(n, 1, s ^ 1).remove(0)).unwrap();
            out.push((p, e));
        }
    }
    out
}

#[test]
fn projection_identity() {
    for (p, e) in cases() {
        let s = surface_area_measure(&p).unwrap();
        let lhs = s.integrate_abs_cos(&e).unwrap();
        let rhs = 2.0 * volume(&p.project(&e).unwrap());
        assert!((lhs - rhs).abs() <= 1e-8 * rhs, "{lhs} vs {rhs}");
    }
}

#[test]
fn projection_bounded_by_vn1() {
    for (p, e) in cases() {
        let proj = volume(&p.project(&e).unwrap());
        assert!(proj <= v_nminus1(&p).unwrap() * (1.0 + 1e-12));
    }
    // equality for a flat body projected along its normal
    let flat = bodies::box_body(&[1.0, 2.0, 0.0]).unwrap();
    let e = Direction::axis(3, 2);
    let proj = volume(&flat.project(&e).unwrap());
    assert!((proj - v_nminus1(&flat).unwrap()).abs() < 1e-12);
    let tilted = Direction::new(vec![0.0, 0.3, 1.0]).unwrap();
    assert!(volume(&flat.project(&tilted).unwrap()) < v_nminus1(&flat).unwrap() - 1e-3);
}

#[test]
fn closedness() {
    for (p, _) in cases() {
        let s = surface_area_measure(&p).unwrap();
        assert!(s.resultant() <= 1e-10 * s.total_mass(), "{}", s.resultant());
    }
    for p in [
        bodies::box_body(&[1.0, 2.0, 0.0]).unwrap(),
        bodies::simplex_regular(4).unwrap(),
        bodies::remark_body(3, 30.0, 0.01).unwrap(),
    ] {
        let s = surface_area_measure(&p).unwrap();
        assert!(s.resultant() <= 1e-10 * s.total_mass());
    }
}

#[test]
fn weak_continuity_smoke() {
    for (p, _) in cases().into_iter().step_by(5) {
        let n = p.dim();
        let jitter = sample_sphere(n, p.vertices().len(), 17);
        let moved: Vec<Vec<f64>> = p
            .vertices()
            .iter()
            .zip(&jitter)
            .map(|(v, j)| v.iter().zip(j).map(|(a, b)| a + 1e-9 * b).collect())
            .collect();
        let q = ConvexPolytope::new(n, moved).unwrap();
        let (a, b) = (
            surface_area_measure(&p).unwrap().total_mass(),
            surface_area_measure(&q).unwrap().total_mass(),
        );
        assert!((a - b).abs() <= 1e-6 * a);
    }
}

#[test]
fn coplanar_facets_merge() {
    // a cube triangulated by the hull still has six atoms
    let s = surface_area_measure(&bodies::box_body(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
    assert_eq!(s.atoms.len(), 6);
    // a flat body carries two opposite atoms
    let s = surface_area_measure(&bodies::box_body(&[1.0, 1.0, 0.0]).unwrap()).unwrap();
    assert_eq!(s.atoms.len(), 2);
    assert!((s.total_mass() - 2.0).abs() < 1e-12);
}
