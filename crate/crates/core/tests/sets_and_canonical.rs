use std::f64::consts::PI;

use heisiso::analysis::{compare, iso_ratio, Larger};
use heisiso::canonical::{
    admissibility, antipode, build_a, build_a_perturbed, cap_concavity_defect, l_profile, AdmissibilityConfig,
    BumpSpec,
};
use heisiso::sets::{
    profile_diameter, profile_max_dist, profile_nc_check, profile_to_sections, Body, ProfileSet, SearchConfig,
    SectionSet,
};
use heisiso::{distance, Exec, Point};

fn cfg() -> SearchConfig {
    SearchConfig { grid_r: 96, grid_theta: 48, nc_samples: 24, ..Default::default() }
}

#[test]
fn a1_diameter_and_witness() {
    let a = build_a(1.0, 512).unwrap();
    let rep = profile_diameter(&a, &cfg()).unwrap();
    assert!((rep.value - 1.0).abs() < 2e-3);
    assert!(rep.lower_witness_gap >= 0.0);
    let (p, q) = &rep.witness;
    assert!(distance(p, q).unwrap() <= rep.value);
    let z = 0.25;
    let p = Point::planar(z, 0.0, a.eval(z));
    let q = Point::planar(z, 0.0, -a.eval(z));
    assert!((distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn max_distance_over_a1() {
    let a = build_a(1.0, 512).unwrap();
    for &r in &[0.0, 0.1, 1.0 / PI] {
        let p = Point::planar(r, 0.0, 1.0 / (2.0 * PI));
        let (v, _) = profile_max_dist(&a, &p, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 2e-3, "r = {r}: {v}");
    }
}

#[test]
fn nc_dichotomy() {
    let a = build_a(1.0, 512).unwrap();
    assert!(profile_nc_check(&a, None, &cfg()).unwrap().worst_slack <= 2e-3);
    let b = ProfileSet::ball(1, 1.0, 512).unwrap();
    let rep = profile_nc_check(&b, None, &cfg()).unwrap();
    assert!(rep.worst_slack >= 0.3);
    assert!((rep.worst_slack - (2.0 - 2f64.sqrt())).abs() < 2e-3);
}

#[test]
fn volume_under_grid_doubling() {
    let exact_a = 0.217_638_190_499_508_6;
    let exact_b = 3.303_503_048_836_701 / 16.0;
    for m in [256, 512, 1024] {
        let va = build_a(1.0, m).unwrap().volume();
        let vb = ProfileSet::ball(1, 0.5, m).unwrap().volume();
        assert!((va / exact_a - 1.0).abs() < 1e-4, "{m}: {va}");
        assert!((vb / exact_b - 1.0).abs() < 1e-4, "{m}: {vb}");
    }
}

#[test]
fn a1_against_half_ball() {
    let a = Body::Profile(build_a(1.0, 512).unwrap());
    let b = Body::Profile(ProfileSet::ball(1, 0.5, 512).unwrap());
    let c = compare(&a, &b, &cfg(), 1e-6).unwrap();
    assert_eq!(c.larger, Larger::A);
    assert!(c.a.ratio / c.b.ratio >= 1.03);
    let three = iso_ratio(&a.dilate(3.0).unwrap(), &cfg()).unwrap();
    assert!((three.ratio / c.a.ratio - 1.0).abs() < 1e-6);
}

#[test]
fn profile_and_section_conversions() {
    let b = ProfileSet::ball(1, 1.0, 512).unwrap();
    let s = profile_to_sections(&b, 10_000).unwrap();
    assert!((s.volume() / b.volume() - 1.0).abs() < 1e-4);
    let b2 = b.dilate(2.0).unwrap();
    let direct = ProfileSet::ball(1, 2.0, 512).unwrap();
    for k in 0..100 {
        let r = 2.0 * k as f64 / 100.0;
        assert!((b2.eval(r) - direct.eval(r)).abs() < 1e-12);
    }
    let text = s.to_json();
    assert_eq!(Body::parse(1, &text).unwrap(), Body::Sections(s));
    assert_eq!(Body::parse(1, &b.to_csv()).unwrap().kind(), heisiso::sets::BodyKind::Profile);
}

#[test]
fn envelopes_of_ball_sections() {
    let b = ProfileSet::ball(1, 1.0, 256).unwrap();
    let s = profile_to_sections(&b, 2000).unwrap();
    let env = s.envelopes(1e-9);
    for k in 0..s.len() {
        let z = &s.zsamples()[k];
        let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
        if r > 0.0 {
            assert!((env.f_plus[k].unwrap() - b.eval(r)).abs() < 1e-9);
            assert!((env.f_minus[k].unwrap() + b.eval(r)).abs() < 1e-9);
        }
    }
    assert!(env.in_u.iter().all(|&x| x));
    assert_eq!(env.ehat.volume(), s.volume());
}

#[test]
fn stacked_points_hull() {
    let s = SectionSet::new(1, vec![vec![0.2, 0.1]], vec![vec![[-0.3, -0.3], [0.4, 0.4]]], None).unwrap();
    let h = s.t_convex_hull();
    assert_eq!(h.sections()[0], vec![[-0.3, 0.4]]);
    let d = h.diameter(Exec::Sequential).unwrap().value;
    assert!((d - (0.7 * PI).sqrt()).abs() < 1e-14);
    assert_eq!(s.diameter(Exec::Sequential).unwrap().value, d);
}

#[test]
fn canonical_profile_examples() {
    assert!((l_profile(1.0, 0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    assert!(l_profile(1.0, 0.5).unwrap().abs() < 1e-15);
    assert_eq!(cap_concavity_defect(1.0, 4000), 0.0);
    let p = Point::planar(0.0, 1.0, 0.0);
    let q = antipode(2.0, &p).unwrap();
    assert!((distance(&p, &q).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn perturbed_sets_keep_volume_and_diameter() {
    let adm = admissibility(1.0, &AdmissibilityConfig::default()).unwrap();
    assert!(adm.r_adm > 0.0 && adm.r_adm < 1.0 / PI);
    let a = profile_to_sections(&build_a(1.0, 512).unwrap(), 3000).unwrap();
    for bump in [BumpSpec::radial(1, 1.0, &adm, 0.7, -1.0), BumpSpec::offcenter(1, 1.0, &adm, 0.3, 2.0, 1.0)] {
        let s = build_a_perturbed(1.0, &bump, &adm, 512, 3000).unwrap();
        assert!((s.volume() / a.volume() - 1.0).abs() < 1e-12);
        assert!((s.diameter(Exec::Parallel).unwrap().value - 1.0).abs() < 2e-3);
        let c = compare(&Body::Sections(s), &Body::Sections(a.clone()), &cfg(), 1e-4).unwrap();
        assert_eq!(c.larger, Larger::Equal);
    }
}

#[test]
fn perturbation_in_two_complex_dimensions() {
    let adm = admissibility(1.0, &AdmissibilityConfig { k_samples: 256, ..Default::default() }).unwrap();
    let bump = BumpSpec::offcenter(2, 1.0, &adm, 0.3, 0.5, 1.0);
    let s = build_a_perturbed(1.0, &bump, &adm, 128, 1500).unwrap();
    assert_eq!(s.n(), 2);
    let d = s.diameter(Exec::Parallel).unwrap().value;
    assert!(d <= 1.0 + 1e-9 && d > 0.99, "{d}");
}
