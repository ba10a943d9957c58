//! Carnot-Carathéodory distance and ball geometry.
//!
//! Every distance computation reduces by left invariance to the offset
//! `[w, s] = p⁻¹·q` and then only depends on `(‖w‖, |s|)`:
//!
//! * `s = 0`: `d = ‖w‖`;
//! * `w = 0`: `d = sqrt(π |s|)`;
//! * otherwise the endpoint lies on the sphere of radius `d` reached with a
//!   parameter `φ ∈ (0, π)` such that `ψ(φ) = g(φ)/ρ(φ)² = |s|/‖w‖²`, and
//!   `d = ‖w‖/ρ(φ) = sqrt(|s|/g(φ))`.
//!
//! [`DistanceMethod::Bisection`] is an independent route that finds the
//! unique `d ≥ ‖w‖` with `d² h(‖w‖/d) = |s|` using the nesting of balls.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{complex_to_flat, horizontal_gap, horizontal_norm, im_dot, Point};
use crate::profile::{
    g_unchecked, h_unchecked, psi_with_derivative, rho_unchecked, ball_profile,
};
use crate::roots::{bisect, newton_bracketed};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMethod {
    #[default]
    Inversion,
    Bisection,
}

/// Upper or lower envelope of a ball or a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }

    pub const BOTH: [Side; 2] = [Side::Upper, Side::Lower];
}

/// Distance from the origin to `[w, s]` given `‖w‖` and `s`.
///
/// This is the hot path of all grid searches and never allocates.
#[inline]
pub fn reduced_distance(w_norm: f64, s: f64) -> f64 {
    let s = s.abs();
    if s == 0.0 {
        return w_norm;
    }
    if w_norm == 0.0 {
        return (PI * s).sqrt();
    }
    let target = s / (w_norm * w_norm);
    if !target.is_finite() {
        return (PI * s).sqrt();
    }
    let log_target = target.ln();
    let fdf = |phi: f64| {
        let (psi, dpsi) = psi_with_derivative(phi);
        (psi.ln() - log_target, dpsi / psi)
    };
    let guess = if target < 1.0 {
        (1.5 * target).min(FRAC_PI_2)
    } else {
        (PI - (PI / target).sqrt()).max(FRAC_PI_2)
    };
    let phi = newton_bracketed(fdf, 0.0, PI, guess, 1e-16).unwrap_or_else(|_| {
        bisect(|phi| psi_with_derivative(phi).0 - target, 0.0, PI, 1e-16)
            .unwrap_or(FRAC_PI_2)
    });
    if phi <= FRAC_PI_2 {
        w_norm / rho_unchecked(phi)
    } else {
        (s / g_unchecked(phi)).sqrt()
    }
}

/// Profile-bisection route: the unique `d ≥ ‖w‖` with `d² h(‖w‖/d) = |s|`.
pub fn reduced_distance_bisection(w_norm: f64, s: f64) -> Result<f64> {
    if !w_norm.is_finite() || !s.is_finite() {
        return Err(Error::NonFinite("reduced distance"));
    }
    let s = s.abs();
    if s == 0.0 {
        return Ok(w_norm);
    }
    if w_norm == 0.0 {
        return Ok((PI * s).sqrt());
    }
    // h ≥ 1/π on [0, 1/2], so d² h(‖w‖/d) ≥ d²/π once d ≥ 2‖w‖.
    let hi = (2.0 * w_norm).max((PI * s).sqrt());
    let height = |d: f64| d * d * h_unchecked((w_norm / d).min(1.0)) - s;
    bisect(height, w_norm, hi, 1e-15 * hi)
}

/// `d(p, q)` by the default inversion method.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    distance_with(p, q, DistanceMethod::Inversion)
}

pub fn distance_with(p: &Point, q: &Point, method: DistanceMethod) -> Result<f64> {
    let off = p.left_offset(q)?;
    let w = off.z_norm();
    let s = off.t();
    if !w.is_finite() || !s.is_finite() {
        return Err(Error::NonFinite("distance"));
    }
    match method {
        DistanceMethod::Inversion => Ok(reduced_distance(w, s)),
        DistanceMethod::Bisection => reduced_distance_bisection(w, s),
    }
}

/// Distance between `[z, t]` and `[z', t']` given flat horizontal slices,
/// without building `Point`s.
#[inline]
pub fn distance_raw(z: &[f64], t: f64, z2: &[f64], t2: f64) -> f64 {
    let s = t2 - t - 2.0 * im_dot(z, z2);
    reduced_distance(horizontal_gap(z, z2), s)
}

/// `d ≤ sqrt(‖w‖² + π|s|)`, used to prune pair sweeps.
#[inline]
pub fn distance_upper_bound(w_norm: f64, s: f64) -> f64 {
    (w_norm * w_norm + PI * s.abs()).sqrt()
}

const ENVELOPE_CELLS: usize = 4096;

/// Cellwise minimum of `h` on a uniform partition of `[0, 1]`. `h` is
/// unimodal, so each cell minimum sits at an endpoint.
fn h_lower_envelope() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let nodes: Vec<f64> = (0..=ENVELOPE_CELLS)
            .map(|i| h_unchecked(i as f64 / ENVELOPE_CELLS as f64))
            .collect();
        nodes.windows(2).map(|w| w[0].min(w[1]) * (1.0 - 1e-12)).collect()
    })
}

/// Cheap certificate that `reduced_distance(w_norm, s) ≤ bound`.
///
/// `d ↦ d² h(‖w‖/d)` increases, so `bound² h(‖w‖/bound) ≥ |s|` implies the
/// claim; `h` is replaced by a tabulated lower envelope. A `false` answer
/// is inconclusive.
#[inline]
pub fn certainly_within(w_norm: f64, s: f64, bound: f64) -> bool {
    if !(w_norm < bound) {
        return false;
    }
    let table = h_lower_envelope();
    let cell = ((w_norm / bound) * ENVELOPE_CELLS as f64) as usize;
    bound * bound * table[cell.min(ENVELOPE_CELLS - 1)] >= s.abs()
}

/// Sphere parametrization from the origin: `χ ∈ Cⁿ`, `φ ∈ [−π, π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParam {
    pub chi: Vec<Complex64>,
    pub phi: f64,
}

impl GeodesicParam {
    pub fn new(chi: Vec<Complex64>, phi: f64) -> Result<Self> {
        if !(phi.abs() <= PI) {
            return Err(Error::Domain {
                what: "phi",
                value: phi,
                domain: "[-pi, pi]",
            });
        }
        if chi.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(GeodesicParam { chi, phi })
    }

    pub fn length(&self) -> f64 {
        self.chi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Endpoint `[ρ(φ) χ, g(φ) ‖χ‖²]`, at distance `‖χ‖` from the origin.
/// Negative `φ` gives the mirror point below the `Cⁿ`-plane.
pub fn geodesic_point(gp: &GeodesicParam) -> Result<Point> {
    if !(gp.phi.abs() <= PI) {
        return Err(Error::Domain {
            what: "phi",
            value: gp.phi,
            domain: "[-pi, pi]",
        });
    }
    let a = gp.phi.abs();
    let scale = rho_unchecked(a);
    let len2 = gp.chi.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let z: Vec<Complex64> = gp.chi.iter().map(|c| c * scale).collect();
    Point::from_complex(&z, gp.phi.signum() * g_unchecked(a) * len2)
}

const BOUNDARY_BAND: f64 = 1e-12;

/// Membership of `p` in the closed (or open) ball of `radius` about `center`.
/// Points within `1e-12` (relative) of the sphere count as inside the closed
/// ball and outside the open one.
pub fn ball_contains(center: &Point, radius: f64, p: &Point, closed: bool) -> Result<bool> {
    if !(radius > 0.0) {
        return Err(Error::Domain {
            what: "radius",
            value: radius,
            domain: "(0, inf)",
        });
    }
    let off = center.left_offset(p)?;
    Ok(reduced_in_ball(off.z_norm(), off.t(), radius, closed))
}

#[inline]
pub(crate) fn reduced_in_ball(w_norm: f64, s: f64, radius: f64, closed: bool) -> bool {
    let tol = BOUNDARY_BAND * radius.max(radius * radius).max(1.0);
    if closed {
        if w_norm > radius * (1.0 + BOUNDARY_BAND) {
            return false;
        }
    } else if w_norm >= radius * (1.0 - BOUNDARY_BAND) {
        return false;
    }
    let prof = radius * radius * h_unchecked((w_norm / radius).min(1.0));
    if closed {
        s.abs() <= prof + tol
    } else {
        s.abs() < prof - tol
    }
}

/// Vertical envelope `± h_d̄(‖z − z_p‖) + t_p + 2 Im(z_p · z̄)` of the
/// closed ball `B̄(p, d̄)` above `z`.
pub fn ball_envelope(p: &Point, dbar: f64, z: &[Complex64], side: Side) -> Result<f64> {
    if z.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: z.len(),
        });
    }
    let zf = complex_to_flat(z);
    let gap = horizontal_gap(&zf, p.horizontal());
    if gap > dbar * (1.0 + BOUNDARY_BAND) {
        return Err(Error::Domain {
            what: "|z - z_p|",
            value: gap,
            domain: "[0, dbar] (outside the projected ball)",
        });
    }
    let prof = ball_profile(dbar, gap.min(dbar))?;
    Ok(side.sign() * prof + p.t() + 2.0 * im_dot(p.horizontal(), &zf))
}

/// Membership in the bicone
/// `F(r) = {‖w − z₁₂‖ ≤ r, |s − (t₁+t₂)/2| ≤ δ₁₂ (1 − ‖w − z₁₂‖/r)}`
/// spanned by the vertical pair `p1` (below) and `p2` (above).
pub fn bicone_contains(p1: &Point, p2: &Point, r: f64, q: &Point) -> Result<bool> {
    if p1.n() != p2.n() || p1.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p1.n(),
            found: if p1.n() != p2.n() { p2.n() } else { q.n() },
        });
    }
    let scale = 1.0 + horizontal_norm(p1.horizontal());
    if horizontal_gap(p1.horizontal(), p2.horizontal()) > 1e-12 * scale {
        return Err(Error::InvalidSet("bicone endpoints are not a vertical pair".into()));
    }
    let half_gap = 0.5 * (p2.t() - p1.t());
    if !(half_gap > 0.0) {
        return Err(Error::InvalidSet(format!(
            "bicone needs t2 > t1, half gap is {half_gap}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::Domain {
            what: "bicone radius",
            value: r,
            domain: "(0, inf)",
        });
    }
    let off = horizontal_gap(q.horizontal(), p1.horizontal());
    if off > r {
        return Ok(false);
    }
    let mid = 0.5 * (p1.t() + p2.t());
    let allowed = half_gap * (1.0 - off / r);
    Ok((q.t() - mid).abs() <= allowed + 1e-12 * (1.0 + mid.abs() + half_gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn special_values() {
        let o = Point::origin(1);
        assert!((distance(&o, &Point::planar(1.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let v = distance(&o, &Point::planar(0.0, 0.0, 1.0)).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-15);
        // mpmath root of g/ρ² = 0.2/0.25
        let d = distance(&o, &Point::planar(0.5, 0.0, 0.2)).unwrap();
        assert!((d - 0.600_526_516_251_436_6).abs() < 1e-13);
        let d2 = distance_with(&o, &Point::planar(0.5, 0.0, 0.2), DistanceMethod::Bisection)
            .unwrap();
        assert!((d2 - 0.600_526_516_251_436_6).abs() < 1e-12);
    }

    #[test]
    fn extreme_ratios_agree() {
        for &(w, s) in &[
            (1.0, 1e-14),
            (1.0, 1e-8),
            (1e-9, 1.0),
            (1e-4, 3.0),
            (2.0, 1e6),
            (7.0, 0.5),
        ] {
            let a = reduced_distance(w, s);
            let b = reduced_distance_bisection(w, s).unwrap();
            assert!((a - b).abs() <= 1e-10 * a, "w={w} s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn upper_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let w: f64 = rng.gen_range(0.0..3.0);
            let s: f64 = rng.gen_range(-3.0..3.0);
            assert!(reduced_distance(w, s) <= distance_upper_bound(w, s) * (1.0 + 1e-12));
            assert!(reduced_distance(w, s) >= w * (1.0 - 1e-12));
        }
    }

    #[test]
    fn geodesic_endpoints_lie_on_spheres() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = Point::origin(2);
        for _ in 0..1000 {
            let chi = vec![
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ];
            let gp = GeodesicParam::new(chi, rng.gen_range(-PI..PI)).unwrap();
            let q = geodesic_point(&gp).unwrap();
            let d = distance(&o, &q).unwrap();
            assert!((d - gp.length()).abs() <= 1e-9 * (1.0 + gp.length()));
        }
        let pole = geodesic_point(&GeodesicParam::new(vec![Complex64::new(1.0, 0.0)], PI).unwrap())
            .unwrap();
        assert!(pole.z_norm() < 1e-15 && (pole.t() - 1.0 / PI).abs() < 1e-15);
        let flat = geodesic_point(&GeodesicParam::new(vec![Complex64::new(0.3, 0.4)], 0.0).unwrap())
            .unwrap();
        assert_eq!(flat, Point::planar(0.3, 0.4, 0.0));
        assert!(GeodesicParam::new(vec![Complex64::new(1.0, 0.0)], 4.0).is_err());
    }

    #[test]
    fn ball_membership() {
        let o = Point::origin(1);
        let pole = Point::planar(0.0, 0.0, 1.0 / PI);
        assert!(ball_contains(&o, 1.0, &pole, true).unwrap());
        assert!(!ball_contains(&o, 1.0, &pole, false).unwrap());
        assert!(!ball_contains(&o, 1.0, &Point::planar(1.001, 0.0, 0.0), true).unwrap());
        assert!(ball_contains(&o, 0.0, &pole, true).is_err());
    }

    #[test]
    fn ball_membership_matches_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = Point::planar(0.2, -0.4, 0.1);
        for _ in 0..10_000 {
            let p = Point::planar(
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
            );
            let d = distance(&c, &p).unwrap();
            if (d - 1.0).abs() < 1e-9 {
                continue;
            }
            assert_eq!(ball_contains(&c, 1.0, &p, true).unwrap(), d <= 1.0);
            assert_eq!(ball_contains(&c, 1.0, &p, false).unwrap(), d < 1.0);
        }
    }

    #[test]
    fn envelopes() {
        let o = Point::origin(1);
        let zero = [Complex64::new(0.0, 0.0)];
        assert!((ball_envelope(&o, 1.0, &zero, Side::Upper).unwrap() - 1.0 / PI).abs() < 1e-12);
        let p = Point::planar(0.3, 0.7, -0.2);
        let zp = p.project();
        let d = 0.8;
        for side in Side::BOTH {
            let e = ball_envelope(&p, d, &zp, side).unwrap();
            assert!((e - (p.t() + side.sign() * d * d / PI)).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let z = [zp[0]
                + Complex64::from_polar(rng.gen_range(0.0..d), rng.gen_range(0.0..2.0 * PI))];
            for side in Side::BOTH {
                let t = ball_envelope(&p, d, &z, side).unwrap();
                let q = Point::from_complex(&z, t).unwrap();
                assert!((distance(&p, &q).unwrap() - d).abs() < 1e-9);
            }
        }
        let far = [Complex64::new(5.0, 0.0)];
        assert!(ball_envelope(&p, d, &far, Side::Upper).is_err());
    }

    #[test]
    fn bicone() {
        let p1 = Point::planar(0.1, 0.2, -0.3);
        let p2 = Point::planar(0.1, 0.2, 0.5);
        let mid = Point::planar(0.1, 0.2, 0.1);
        assert!(bicone_contains(&p1, &p2, 0.2, &mid).unwrap());
        assert!(bicone_contains(&p1, &p2, 0.2, &p1).unwrap());
        assert!(bicone_contains(&p1, &p2, 0.2, &p2).unwrap());
        assert!(!bicone_contains(&p1, &p2, 0.2, &Point::planar(0.4, 0.2, 0.1)).unwrap());
        assert!(bicone_contains(&p2, &p1, 0.2, &mid).is_err());
        assert!(bicone_contains(&p1, &Point::planar(0.2, 0.2, 0.5), 0.2, &mid).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let q = Point::planar(
                rng.gen_range(-0.3..0.5),
                rng.gen_range(-0.2..0.6),
                rng.gen_range(-0.4..0.6),
            );
            let r1 = rng.gen_range(0.01..0.3);
            let r2 = r1 + rng.gen_range(0.0..0.3);
            if bicone_contains(&p1, &p2, r1, &q).unwrap() {
                assert!(bicone_contains(&p1, &p2, r2, &q).unwrap());
            }
        }
    }

    #[test]
    fn within_certificate_is_sound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut certified = 0;
        for _ in 0..20_000 {
            let w: f64 = rng.gen_range(0.0..2.0);
            let s: f64 = rng.gen_range(-2.0..2.0);
            let bound: f64 = rng.gen_range(0.01..3.0);
            if certainly_within(w, s, bound) {
                certified += 1;
                assert!(reduced_distance(w, s) <= bound * (1.0 + 1e-12));
            }
        }
        assert!(certified > 5_000);
    }
}
