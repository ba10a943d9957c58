use std::f64::consts::PI;

use heisiso::metric::{distance, distance_with, DistanceMethod};
use heisiso::profile::ball_profile;
use heisiso::sets::{random_sigma_invariant, RandomSetSpec};
use heisiso::{Exec, Point, RotationAngles};
use proptest::prelude::*;

fn point(n: usize, scale: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-scale..scale, 2 * n + 1).prop_map(|c| Point::from_flat(c).unwrap())
}

fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
    (1usize..=3).prop_flat_map(|n| (point(n, 3.0), point(n, 3.0), point(n, 3.0)))
}

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.as_flat().iter().zip(b.as_flat()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn group_law_is_associative((p, q, r) in triple()) {
        let left = p.mul(&q).unwrap().mul(&r).unwrap();
        let right = p.mul(&q.mul(&r).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn inverse_and_identity((p, _, _) in triple()) {
        let e = Point::origin(p.n());
        prop_assert_eq!(p.mul(&p.inv()).unwrap(), e.clone());
        prop_assert_eq!(p.mul(&e).unwrap(), p.clone());
    }

    #[test]
    fn dilations_are_automorphisms((p, q, _) in triple(), lam in 0.01f64..10.0) {
        let a = p.mul(&q).unwrap().dilate(lam).unwrap();
        let b = p.dilate(lam).unwrap().mul(&q.dilate(lam).unwrap()).unwrap();
        prop_assert!(close(&a, &b, 1e-11));
    }

    #[test]
    fn metric_axioms((p, q, r) in triple()) {
        let d = distance(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(rel(distance(&q, &p).unwrap(), d) <= 1e-10 || d < 1e-300);
        prop_assert!(distance(&p, &p).unwrap() == 0.0);
        let slack = distance(&p, &r).unwrap() + distance(&r, &q).unwrap() - d;
        prop_assert!(slack >= -1e-9);
    }

    #[test]
    fn invariances((p, q, a) in triple(), lam in 0.05f64..20.0, th in 0.0f64..6.3) {
        let d = distance(&p, &q).unwrap();
        prop_assume!(d > 1e-9);
        prop_assert!(rel(distance(&a.mul(&p).unwrap(), &a.mul(&q).unwrap()).unwrap(), d) <= 1e-10);
        prop_assert!(rel(distance(&p.dilate(lam).unwrap(), &q.dilate(lam).unwrap()).unwrap(), lam * d) <= 1e-10);
        let rot = RotationAngles::uniform(p.n(), th);
        prop_assert!(rel(distance(&p.rotate(&rot).unwrap(), &q.rotate(&rot).unwrap()).unwrap(), d) <= 1e-10);
        prop_assert!(rel(distance(&p.iota(), &q.iota()).unwrap(), d) <= 1e-10);
    }

    #[test]
    fn inversion_agrees_with_bisection((p, q, _) in triple()) {
        let a = distance_with(&p, &q, DistanceMethod::Inversion).unwrap();
        let b = distance_with(&p, &q, DistanceMethod::Bisection).unwrap();
        prop_assert!(rel(a, b) <= 1e-8 || a < 1e-300);
    }

    #[test]
    fn vertical_segments_stay_in_balls((p, base, _) in triple(), len in 0.0f64..2.0, frac in 0.0f64..=1.0) {
        let z = base.horizontal();
        let p1 = base.clone();
        let p2 = Point::from_horizontal(z, base.t() + len).unwrap();
        let q = Point::from_horizontal(z, base.t() + frac * len).unwrap();
        let bound = distance(&p, &p1).unwrap().max(distance(&p, &p2).unwrap());
        prop_assert!(distance(&p, &q).unwrap() <= bound + 1e-9);
    }

    #[test]
    fn balls_are_nested(d1 in 0.01f64..5.0, grow in 1.0001f64..3.0, frac in 0.0f64..1.0) {
        let d2 = d1 * grow;
        let r = frac * d1;
        prop_assert!(ball_profile(d1, r).unwrap() < ball_profile(d2, r).unwrap());
    }

    #[test]
    fn horizontal_and_vertical_special_cases(x in -5.0f64..5.0, y in -5.0f64..5.0, c in -3.0f64..3.0, t in -2.0f64..2.0, dt in -4.0f64..4.0) {
        let p = Point::planar(x, y, t);
        let q = Point::planar(c * x, c * y, t);
        let expect = ((1.0 - c) * (1.0 - c) * (x * x + y * y)).sqrt();
        prop_assert!((distance(&p, &q).unwrap() - expect).abs() <= 1e-10 * expect.max(1e-300));
        let q = Point::planar(x, y, t + dt);
        let expect = (PI * dt.abs()).sqrt();
        prop_assert!((distance(&p, &q).unwrap() - expect).abs() <= 1e-10 * expect.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_respect_diameter_and_volume(seed in any::<u64>(), pairs in 3usize..30) {
        let s = random_sigma_invariant(&RandomSetSpec { pairs, ..Default::default() }, seed).unwrap();
        let d = s.diameter(Exec::Sequential).unwrap().value;
        let st = s.steiner_symmetrize();
        prop_assert_eq!(st.volume(), s.volume());
        prop_assert!(st.diameter(Exec::Sequential).unwrap().value <= d + 1e-6);
        let tco = s.t_convex_hull();
        prop_assert!((tco.diameter(Exec::Sequential).unwrap().value - d).abs() <= 1e-6);
        prop_assert_eq!(tco.t_convex_hull(), tco);
    }

    #[test]
    fn interior_points_are_not_diametral(seed in any::<u64>(), frac in 0.01f64..0.99) {
        let s = random_sigma_invariant(&RandomSetSpec { pairs: 10, ..Default::default() }, seed).unwrap();
        let diam = s.diameter(Exec::Sequential).unwrap().value;
        for (k, secs) in s.sections().iter().enumerate() {
            let z = &s.zsamples()[k];
            for iv in secs.iter().filter(|iv| iv[1] > iv[0]) {
                let q = Point::from_horizontal(z, iv[0] + frac * (iv[1] - iv[0])).unwrap();
                let (far, _) = s.max_dist_from_point(&q).unwrap();
                prop_assert!(far < diam);
            }
        }
    }
}
