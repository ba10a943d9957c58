//! Randomized and deterministic checks of the geometric facts the library
//! relies on. Every check is seeded, so a report is reproducible bit for bit.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ratio::iso_ratio;
use crate::canonical::{
    admissibility, antipode, build_a, build_a_perturbed, l_profile, AdmissibilityConfig, BumpSpec,
};
use crate::constants::{cone_alpha, lemma_constants, thin_radius};
use crate::exec::{map_indexed, Exec};
use crate::metric::{ball_contains, distance, distance_with, DistanceMethod};
use crate::point::{Point, RotationAngles};
use crate::profile::{ball_profile, critical_point, h_fn, h_prime, h_second, psi};
use crate::sets::{profile_to_sections, random_sigma_invariant, Body, ProfileSet, RandomSetSpec, SearchConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
    pub all_pass: bool,
}

struct Ctx {
    seed: u64,
    full: bool,
    exec: Exec,
    claims: Vec<ClaimResult>,
}

impl Ctx {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn size(&self, fast: usize, full: usize) -> usize {
        if self.full {
            full
        } else {
            fast
        }
    }

    fn record(&mut self, name: &str, residual: f64, tolerance: f64, samples: usize) {
        self.claims.push(ClaimResult {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            samples,
        });
    }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Point {
    let coords = (0..2 * n + 1).map(|_| rng.gen_range(-scale..scale)).collect();
    Point::from_flat(coords).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn random_n(rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(1..=3)
}

fn special_distances(ctx: &mut Ctx) {
    let count = 1000;
    let mut rng = ctx.rng(1);
    let (mut horiz, mut vert) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let n = random_n(&mut rng);
        let p = random_point(&mut rng, n, 3.0);
        let c: f64 = rng.gen_range(-3.0..3.0);
        let zq: Vec<f64> = p.horizontal().iter().map(|v| c * v).collect();
        let q = Point::from_horizontal(&zq, p.t()).unwrap();
        let expect = crate::point::horizontal_gap(p.horizontal(), &zq);
        horiz = horiz.max(rel(distance(&p, &q).unwrap(), expect));
        let dt: f64 = rng.gen_range(-3.0..3.0);
        let q = Point::from_horizontal(p.horizontal(), p.t() + dt).unwrap();
        vert = vert.max(rel(distance(&p, &q).unwrap(), (PI * dt.abs()).sqrt()));
    }
    ctx.record("horizontal_distance_formula", horiz, 1e-10, count);
    ctx.record("vertical_distance_formula", vert, 1e-10, count);
}

fn cross_oracle(ctx: &mut Ctx) {
    let count = ctx.size(2000, 10_000);
    let mut rng = ctx.rng(2);
    let pairs: Vec<(Point, Point)> = (0..count)
        .map(|_| {
            let n = random_n(&mut rng);
            let scale = 10f64.powf(rng.gen_range(-2.0..1.0)) / (2.0 * n as f64 + 1.0).sqrt();
            (random_point(&mut rng, n, scale), random_point(&mut rng, n, scale))
        })
        .collect();
    let errs = map_indexed(ctx.exec, count, |i| {
        let (p, q) = &pairs[i];
        let a = distance_with(p, q, DistanceMethod::Inversion).unwrap();
        let b = distance_with(p, q, DistanceMethod::Bisection).unwrap();
        rel(a, b)
    });
    ctx.record("distance_cross_oracle", errs.into_iter().fold(0.0, f64::max), 1e-8, count);
}

fn metric_axioms(ctx: &mut Ctx) {
    let count = ctx.size(1000, 10_000);
    let mut rng = ctx.rng(3);
    let (mut sym, mut tri, mut left, mut dil, mut rot, mut iota) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let n = random_n(&mut rng);
        let p = random_point(&mut rng, n, 2.0);
        let q = random_point(&mut rng, n, 2.0);
        let r = random_point(&mut rng, n, 2.0);
        let d = distance(&p, &q).unwrap();
        sym = sym.max(rel(distance(&q, &p).unwrap(), d));
        let slack = distance(&p, &r).unwrap() + distance(&r, &q).unwrap() - d;
        tri = tri.max(-slack);
        let a = random_point(&mut rng, n, 2.0);
        let moved = distance(&a.mul(&p).unwrap(), &a.mul(&q).unwrap()).unwrap();
        left = left.max(rel(moved, d));
        let lam = rng.gen_range(0.1..5.0);
        let scaled = distance(&p.dilate(lam).unwrap(), &q.dilate(lam).unwrap()).unwrap();
        dil = dil.max(rel(scaled, lam * d));
        let angles = RotationAngles::new((0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect());
        let rotated = distance(&p.rotate(&angles).unwrap(), &q.rotate(&angles).unwrap()).unwrap();
        rot = rot.max(rel(rotated, d));
        iota = iota.max(rel(distance(&p.iota(), &q.iota()).unwrap(), d));
    }
    ctx.record("metric_symmetry", sym, 1e-10, count);
    ctx.record("triangle_inequality", tri.max(0.0), 1e-9, count);
    ctx.record("left_invariance", left, 1e-10, count);
    ctx.record("dilation_homogeneity", dil, 1e-10, count);
    ctx.record("rotation_isometry", rot, 1e-10, count);
    ctx.record("iota_isometry", iota, 1e-10, count);
}

fn profile_identities(ctx: &mut Ctx) {
    let ident = (h_fn(0.0).unwrap() - 1.0 / PI)
        .abs()
        .max((h_fn(2.0 / PI).unwrap() - 2.0 / PI).abs())
        .max(h_fn(1.0).unwrap().abs());
    ctx.record("profile_special_values", ident, 1e-12, 3);

    let m = 981;
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for k in 0..=m {
        let r = 0.01 + 0.98 * k as f64 / m as f64;
        let e = 1e-6;
        let fd1 = (h_fn(r + e).unwrap() - h_fn(r - e).unwrap()) / (2.0 * e);
        d1 = d1.max((fd1 - h_prime(r).unwrap()).abs());
        let e = 4e-7;
        let fd2 = (h_prime(r + e).unwrap() - h_prime(r - e).unwrap()) / (2.0 * e);
        d2 = d2.max((fd2 - h_second(r).unwrap()).abs());
    }
    ctx.record("h_prime_finite_difference", d1, 1e-6, m + 1);
    ctx.record("h_second_finite_difference", d2, 1e-6, m + 1);

    let (phi_c, r_c) = critical_point();
    let eq = (phi_c * phi_c.sin() + phi_c.cos()).abs();
    let brackets = h_second(r_c - 1e-3).unwrap() * h_second(r_c + 1e-3).unwrap() < 0.0;
    ctx.record("inflection_point", if brackets { eq } else { f64::INFINITY }, 1e-12, 1);

    let grid = 10_000;
    let vals: Vec<f64> = (1..grid).map(|k| psi(PI * k as f64 / grid as f64)).collect();
    let bad = vals.windows(2).filter(|w| !(w[1] > w[0])).count();
    ctx.record("psi_strictly_increasing", bad as f64, 0.0, grid - 1);

    let mut nest = 0usize;
    for k in 0..200 {
        let d1 = 0.2 + 0.01 * k as f64;
        let d2 = d1 * 1.05;
        for j in 0..50 {
            let r = d1 * j as f64 / 50.0;
            if !(ball_profile(d1, r).unwrap() < ball_profile(d2, r).unwrap()) {
                nest += 1;
            }
        }
    }
    ctx.record("ball_nesting", nest as f64, 0.0, 10_000);
}

fn vertical_segments(ctx: &mut Ctx) {
    let count = 1000;
    let mut rng = ctx.rng(4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let n = random_n(&mut rng);
        let p = random_point(&mut rng, n, 1.0);
        let base = random_point(&mut rng, n, 1.0);
        let len = rng.gen_range(0.0..1.0);
        let p1 = base.clone();
        let p2 = Point::from_horizontal(base.horizontal(), base.t() + len).unwrap();
        let q = Point::from_horizontal(base.horizontal(), base.t() + rng.gen_range(0.0..=len)).unwrap();
        let excess = distance(&p, &q).unwrap() - distance(&p, &p1).unwrap().max(distance(&p, &p2).unwrap());
        worst = worst.max(excess);
    }
    ctx.record("vertical_segment_in_ball", worst.max(0.0), 1e-9, count);
}

fn cone_property(ctx: &mut Ctx) {
    let count = 1000;
    let mut rng = ctx.rng(5);
    let mut violations = 0usize;
    for _ in 0..count {
        let d = rng.gen_range(0.3..3.0);
        let delta = rng.gen_range(0.02..0.98) * 2.0 * d * d / PI;
        let alpha = cone_alpha(d, delta).unwrap();
        let rbar = thin_radius(d, delta).unwrap();
        // A sphere point with t_p ≥ δ has ‖z_p‖ ≤ r̄ and t_p = h_d(‖z_p‖).
        let rp = loop {
            let r = rng.gen_range(0.0..rbar);
            if ball_profile(d, r).unwrap() >= delta {
                break r;
            }
        };
        let ang: f64 = rng.gen_range(0.0..2.0 * PI);
        let tp = ball_profile(d, rp).unwrap();
        let wr = rng.gen_range(0.0..1.2 * d);
        let wa: f64 = rng.gen_range(0.0..2.0 * PI);
        let (zx, zy) = (rp * ang.cos(), rp * ang.sin());
        let (wx, wy) = (wr * wa.cos(), wr * wa.sin());
        let gap = ((wx - zx).powi(2) + (wy - zy).powi(2)).sqrt();
        let s = tp + alpha * gap + rng.gen_range(1e-9..0.2) * d * d;
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let q = Point::planar(wx, wy, sign * s);
        if ball_contains(&Point::origin(1), d, &q, true).unwrap() {
            violations += 1;
        }
    }
    ctx.record("outer_cone_property", violations as f64, 0.0, count);
}

fn bicone_property(ctx: &mut Ctx) {
    let count = 1000;
    let per = 10;
    let mut rng = ctx.rng(6);
    let mut violations = 0usize;
    let mut beta_err = 0.0f64;
    for _ in 0..count {
        let n = random_n(&mut rng);
        let d = rng.gen_range(0.5..2.0);
        let delta = rng.gen_range(0.05..0.9) * d * d / PI;
        let c = rng.gen_range(0.0..2.0);
        let k = lemma_constants(c, d, delta).unwrap();
        beta_err = beta_err.max((k.beta - (k.alpha + 2.0 * c)).abs());
        // Vertical pair p₁, p₂ over z₁₂ with ‖z₁₂‖ ≤ C and half-gap δ.
        let mut z12: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = crate::point::horizontal_norm(&z12).max(1e-12);
        let scale = c * rng.gen_range(0.0..1.0) / norm;
        z12.iter_mut().for_each(|v| *v *= scale);
        let tmid = rng.gen_range(-1.0..1.0);
        let p1 = Point::from_horizontal(&z12, tmid - delta).unwrap();
        let p2 = Point::from_horizontal(&z12, tmid + delta).unwrap();
        // Centre p with p₁, p₂ ∈ B̄(p, d): in the frame of the midpoint,
        // p = [z, t] needs |t ± δ| ≤ h_d(‖z‖).
        let (zr, room) = loop {
            let r = d * rng.gen_range(0.0f64..1.0).sqrt();
            let room = ball_profile(d, r).unwrap() - delta;
            if room > 0.0 {
                break (r, room);
            }
        };
        let mut zc: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let zn = crate::point::horizontal_norm(&zc).max(1e-12);
        zc.iter_mut().for_each(|v| *v *= zr / zn);
        let local = Point::from_horizontal(&zc, rng.gen_range(-room..room)).unwrap();
        let mid = Point::from_horizontal(&z12, tmid).unwrap();
        let p = mid.mul(&local).unwrap();
        for _ in 0..per {
            let mut dir: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dn = crate::point::horizontal_norm(&dir).max(1e-12);
            let rho = k.gamma * rng.gen_range(0.0f64..1.0).powf(0.5);
            dir.iter_mut().for_each(|v| *v *= rho / dn);
            let w: Vec<f64> = z12.iter().zip(&dir).map(|(a, b)| a + b).collect();
            let height = delta * (1.0 - rho / k.gamma);
            let s = tmid + height * rng.gen_range(-1.0..=1.0);
            let q = Point::from_horizontal(&w, s).unwrap();
            if !ball_contains(&p, d, &q, true).unwrap() {
                violations += 1;
            }
        }
        for q in [&p1, &p2] {
            if !ball_contains(&p, d, q, true).unwrap() {
                violations += 1;
            }
        }
    }
    ctx.record("bicone_in_ball", violations as f64, 0.0, count * (per + 2));
    ctx.record("beta_identity", beta_err, 0.0, count);
}

fn transform_lemmas(ctx: &mut Ctx) {
    let count = ctx.size(20, 100);
    let base = ctx.seed;
    let exec = ctx.exec;
    let rows = map_indexed(exec, count, |i| {
        let shape = RandomSetSpec { pairs: 40, ..Default::default() };
        let s = random_sigma_invariant(&shape, base.wrapping_add(1000 + i as u64)).unwrap();
        let d = s.diameter(Exec::Sequential).unwrap().value;
        let st = s.steiner_symmetrize();
        let tco = s.t_convex_hull();
        let d_st = st.diameter(Exec::Sequential).unwrap().value;
        let d_tco = tco.diameter(Exec::Sequential).unwrap().value;
        let vol_gap = (st.volume() - s.volume()).abs();
        (vol_gap, d_st - d, (d_tco - d).abs())
    });
    let vol = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let st = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let tco = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    ctx.record("steiner_preserves_volume", vol, 0.0, count);
    ctx.record("steiner_does_not_increase_diameter", st.max(0.0), 1e-6, count);
    ctx.record("t_convex_hull_preserves_diameter", tco, 1e-6, count);
}

fn canonical_claims(ctx: &mut Ctx) {
    let search = SearchConfig { exec: ctx.exec, ..Default::default() };
    let a1 = build_a(1.0, 512).unwrap();
    let ball = ProfileSet::ball(1, 0.5, 512).unwrap();
    let ball1 = ProfileSet::ball(1, 1.0, 512).unwrap();

    let dia = crate::sets::profile_diameter(&a1, &search).unwrap();
    ctx.record("diameter_of_a1", (dia.value - 1.0).abs(), 2e-3, 1);
    let z = 0.2;
    let vertical = distance(
        &Point::planar(z, 0.0, 1.0 / (2.0 * PI)),
        &Point::planar(z, 0.0, -1.0 / (2.0 * PI)),
    )
    .unwrap();
    ctx.record("vertical_witness_of_a1", (vertical - 1.0).abs(), 1e-12, 1);

    let count = ctx.size(200, 1000);
    let mut rng = ctx.rng(7);
    let mut worst = 0.0f64;
    let mut involution = 0.0f64;
    for _ in 0..count {
        let r = rng.gen_range(1.0 / PI + 1e-9..0.5);
        let ang: f64 = rng.gen_range(0.0..2.0 * PI);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = Point::planar(r * ang.cos(), r * ang.sin(), sign * l_profile(1.0, r).unwrap());
        let q = antipode(1.0, &p).unwrap();
        worst = worst.max((distance(&p, &q).unwrap() - 1.0).abs());
        let back = antipode(1.0, &q).unwrap();
        for (a, b) in back.as_flat().iter().zip(p.as_flat()) {
            involution = involution.max((a - b).abs());
        }
    }
    ctx.record("antipode_distance", worst, 1e-6, count);
    ctx.record("antipode_involution", involution, 1e-9, count);

    for (name, body) in [("cylinder_bound_a1", &a1), ("cylinder_bound_ball", &ball)] {
        let d = crate::sets::profile_diameter(body, &search).unwrap().value;
        let excess = (2.0 * body.radius() - d).max(2.0 * PI * body.max_height() - d * d);
        ctx.record(name, excess.max(0.0), 1e-9, 1);
    }

    let nc_a = crate::sets::profile_nc_check(&a1, Some(1.0), &search).unwrap();
    ctx.record("nc_holds_on_a1", nc_a.worst_slack.max(0.0), 2e-3, nc_a.samples.len());
    let nc_b = crate::sets::profile_nc_check(&ball1, None, &search).unwrap();
    ctx.record("nc_fails_on_ball", (0.3 - nc_b.worst_slack).max(0.0), 0.0, nc_b.samples.len());

    let ra = iso_ratio(&Body::Profile(a1.clone()), &search).unwrap();
    let rb = iso_ratio(&Body::Profile(ball.clone()), &search).unwrap();
    ctx.record("ball_is_not_isodiametric", (1.03 - ra.ratio / rb.ratio).max(0.0), 0.0, 2);

    let adm = admissibility(1.0, &AdmissibilityConfig { exec: ctx.exec, ..Default::default() }).unwrap();
    let bumps: Vec<BumpSpec> = if ctx.full {
        let mut v: Vec<BumpSpec> = (0..5)
            .map(|k| BumpSpec::radial(1, 1.0, &adm, 0.5 + 0.1 * k as f64, if k % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        v.extend((0..5).map(|k| BumpSpec::offcenter(1, 1.0, &adm, 0.2 + 0.1 * k as f64, 1.3 * k as f64, 1.0)));
        v
    } else {
        vec![BumpSpec::radial(1, 1.0, &adm, 0.9, 1.0), BumpSpec::offcenter(1, 1.0, &adm, 0.4, 0.7, -1.0)]
    };
    let zcount = 4000;
    let base = profile_to_sections(&a1, zcount).unwrap();
    let v0 = base.volume();
    let (mut vol, mut dia) = (0.0f64, 0.0f64);
    for b in &bumps {
        let s = build_a_perturbed(1.0, b, &adm, 512, zcount).unwrap();
        vol = vol.max(rel(s.volume(), v0));
        dia = dia.max((s.diameter(ctx.exec).unwrap().value - 1.0).abs());
    }
    ctx.record("perturbation_preserves_volume", vol, 1e-6, bumps.len());
    ctx.record("perturbation_preserves_diameter", dia, 2e-3, bumps.len());

    let mut bad = BumpSpec::radial(1, 1.0, &adm, 0.9, 1.0);
    bad.lipschitz = PI * adm.r_adm;
    bad.amplitude = bad.lipschitz * bad.support_radius;
    let rejected = build_a_perturbed(1.0, &bad, &adm, 64, 100).is_err();
    ctx.record("inadmissible_bump_rejected", if rejected { 0.0 } else { 1.0 }, 0.0, 1);

    // Radial bumps commute with rotations; off-center ones do not.
    let radial = &bumps[0];
    let off = bumps.last().unwrap();
    let mut radial_asym = 0.0f64;
    let mut off_asym = 0.0f64;
    for k in 0..64 {
        let r = 1.0 / PI * k as f64 / 64.0;
        let a = 0.3 * k as f64;
        let z = [r * a.cos(), r * a.sin()];
        let zr = [-z[0], -z[1]];
        radial_asym = radial_asym.max((radial.eval(&z) - radial.eval(&zr)).abs());
        off_asym = off_asym.max((off.eval(&z) - off.eval(&zr)).abs());
    }
    let breaks = radial_asym == 0.0 && off_asym > 0.0;
    ctx.record("offcenter_bump_breaks_rotation_invariance", if breaks { 0.0 } else { 1.0 }, 0.0, 64);
}

/// Runs all checks. `Fast` trims sample counts; `Full` uses the complete
/// sweeps. The report does not depend on `exec`.
pub fn verify_suite(level: VerifyLevel, seed: u64, exec: Exec) -> VerifyReport {
    let mut ctx = Ctx { seed, full: level == VerifyLevel::Full, exec, claims: Vec::new() };
    special_distances(&mut ctx);
    cross_oracle(&mut ctx);
    metric_axioms(&mut ctx);
    profile_identities(&mut ctx);
    vertical_segments(&mut ctx);
    cone_property(&mut ctx);
    bicone_property(&mut ctx);
    transform_lemmas(&mut ctx);
    canonical_claims(&mut ctx);
    let all_pass = ctx.claims.iter().all(|c| c.pass);
    VerifyReport { level, seed, claims: ctx.claims, all_pass }
}

