//! Scalar profile functions of the unit CC ball.
//!
//! With `g(φ) = (2φ − sin 2φ)/(2φ²)` and `ρ(φ) = sin φ / φ`, the closed
//! unit ball is `{‖z‖ ≤ 1, |t| ≤ h(‖z‖)}` where `h = g ∘ ρ⁻¹`. The radius-λ
//! ball uses `h_λ(r) = λ² h(r/λ)`.
//!
//! Series expansions replace the direct formulas for `φ < 1e-3` and
//! `φ > π − 1e-3` to avoid cancellation.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use crate::error::{check_domain, Error, Result};
use crate::roots::{bisect, newton_bracketed};

const SMALL: f64 = 1e-3;

/// `1/π`, the height of the unit ball at the pole.
pub const POLE_HEIGHT: f64 = 1.0 / PI;

/// `g(φ)` on `[0, π]`; `g(0) = 0`.
pub fn g_fn(phi: f64) -> Result<f64> {
    check_domain("phi", phi, 0.0, PI, "[0, pi]")?;
    Ok(g_unchecked(phi))
}

/// `ρ(φ) = sin φ / φ` on `[0, π]`; `ρ(0) = 1`.
pub fn rho_fn(phi: f64) -> Result<f64> {
    check_domain("phi", phi, 0.0, PI, "[0, pi]")?;
    Ok(rho_unchecked(phi))
}

#[inline]
pub(crate) fn g_unchecked(phi: f64) -> f64 {
    if phi < SMALL {
        let p2 = phi * phi;
        phi * (2.0 / 3.0 - p2 * (2.0 / 15.0 - p2 * (4.0 / 315.0)))
    } else {
        (2.0 * phi - (2.0 * phi).sin()) / (2.0 * phi * phi)
    }
}

#[inline]
pub(crate) fn rho_unchecked(phi: f64) -> f64 {
    if phi < SMALL {
        let p2 = phi * phi;
        1.0 - p2 * (1.0 / 6.0 - p2 * (1.0 / 120.0 - p2 / 5040.0))
    } else if phi > PI - SMALL {
        // sin φ = sin(π − φ), evaluated on the small complement.
        let eps = PI - phi;
        let e2 = eps * eps;
        eps * (1.0 - e2 * (1.0 / 6.0 - e2 / 120.0)) / phi
    } else {
        phi.sin() / phi
    }
}

/// `1 − ρ(φ)` without cancellation near `φ = 0`.
#[inline]
pub(crate) fn one_minus_rho(phi: f64) -> f64 {
    if phi < 0.5 {
        // (φ − sin φ)/φ = Σ_{k≥1} (−1)^{k+1} φ^{2k} / (2k+1)!
        let p2 = phi * phi;
        let mut term = p2 / 6.0;
        let mut acc = term;
        for k in 2..10 {
            term *= -p2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            acc += term;
        }
        acc
    } else {
        1.0 - rho_unchecked(phi)
    }
}

/// `ρ'(φ) = (φ cos φ − sin φ)/φ²`.
#[inline]
pub(crate) fn rho_prime(phi: f64) -> f64 {
    if phi < SMALL {
        let p2 = phi * phi;
        -phi * (1.0 / 3.0 - p2 * (1.0 / 30.0 - p2 / 840.0))
    } else {
        (phi * phi.cos() - phi.sin()) / (phi * phi)
    }
}

/// `g'(φ) = 2 cos φ (sin φ − φ cos φ)/φ³`.
#[inline]
pub(crate) fn g_prime(phi: f64) -> f64 {
    if phi < SMALL {
        let p2 = phi * phi;
        2.0 / 3.0 - p2 * (2.0 / 5.0 - p2 * (4.0 / 63.0))
    } else {
        let (s, c) = phi.sin_cos();
        2.0 * c * (s - phi * c) / (phi * phi * phi)
    }
}

/// `ψ(φ) = g(φ)/ρ(φ)²` together with `ψ'(φ)`. This is `|s|/‖w‖²` for the
/// sphere point reached with parameter `φ`, and it is strictly increasing
/// from 0 to +∞ on `(0, π)`.
#[inline]
pub(crate) fn psi_with_derivative(phi: f64) -> (f64, f64) {
    let g = g_unchecked(phi);
    let r = rho_unchecked(phi);
    let psi = g / (r * r);
    let dpsi = g_prime(phi) / (r * r) - 2.0 * g * rho_prime(phi) / (r * r * r);
    (psi, dpsi)
}

pub fn psi(phi: f64) -> f64 {
    psi_with_derivative(phi).0
}

/// `ρ⁻¹ : [0, 1] → [0, π]`.
pub fn rho_inv(r: f64) -> Result<f64> {
    check_domain("r", r, 0.0, 1.0, "[0, 1]")?;
    Ok(rho_inv_unchecked(r))
}

pub(crate) fn rho_inv_unchecked(r: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    if r <= 0.0 {
        return PI;
    }
    let gap = 1.0 - r;
    // Solve 1 − ρ(φ) = 1 − r, which stays well conditioned as r → 1.
    let fdf = |phi: f64| (one_minus_rho(phi) - gap, -rho_prime(phi));
    let guess = if gap < 0.1 {
        (6.0 * gap).sqrt()
    } else {
        // ρ(φ) ≈ 1 − φ/π near π is too crude; start from the chord.
        PI * (1.0 - r)
    };
    newton_bracketed(fdf, 0.0, PI, guess, 1e-16)
        .or_else(|_| bisect(|phi| one_minus_rho(phi) - gap, 0.0, PI, 1e-16))
        .unwrap_or(FRAC_PI_2)
}

/// `h(r) = g(ρ⁻¹(r))`, the unit-ball profile.
pub fn h_fn(r: f64) -> Result<f64> {
    check_domain("r", r, 0.0, 1.0, "[0, 1]")?;
    Ok(h_unchecked(r))
}

#[inline]
pub(crate) fn h_unchecked(r: f64) -> f64 {
    g_unchecked(rho_inv_unchecked(r))
}

/// `h'(r) = −2 cos φ / φ` with `φ = ρ⁻¹(r)`; unbounded at `r = 1`.
pub fn h_prime(r: f64) -> Result<f64> {
    if r == 1.0 {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "[0, 1) (h' is unbounded at 1)",
        });
    }
    check_domain("r", r, 0.0, 1.0, "[0, 1)")?;
    Ok(h_prime_unchecked(r))
}

#[inline]
pub(crate) fn h_prime_unchecked(r: f64) -> f64 {
    let phi = rho_inv_unchecked(r);
    -2.0 * phi.cos() / phi
}

/// `h''(r) = 2 (φ sin φ + cos φ)/(φ² ρ'(φ))` on the open interval `(0, 1)`.
pub fn h_second(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "(0, 1)",
        });
    }
    let phi = rho_inv_unchecked(r);
    let num = phi * phi.sin() + phi.cos();
    Ok(2.0 * num / (phi * phi * rho_prime(phi)))
}

/// The inflection of `h`: `φ_c ∈ (π/2, π)` solving `φ sin φ + cos φ = 0`,
/// and `r_c = ρ(φ_c)`.
pub fn critical_point() -> (f64, f64) {
    let phi_c = newton_bracketed(
        |p| (p * p.sin() + p.cos(), p * p.cos()),
        FRAC_PI_2,
        PI,
        2.8,
        1e-16,
    )
    .expect("phi sin phi + cos phi changes sign on (pi/2, pi)");
    (phi_c, rho_unchecked(phi_c))
}

/// `h_λ(r) = λ² h(r/λ)` for `0 ≤ r ≤ λ`.
pub fn ball_profile(lambda: f64, r: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            what: "radius",
            value: lambda,
            domain: "(0, inf)",
        });
    }
    let x = r / lambda;
    check_domain("r / radius", x, 0.0, 1.0 + 1e-12, "[0, 1]")?;
    Ok(lambda * lambda * h_unchecked(x.min(1.0)))
}

/// Radius where `h` peaks: `2/π`, with `h(2/π) = 2/π`.
pub const H_PEAK_RADIUS: f64 = FRAC_2_PI;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn g_and_rho_reference_values() {
        assert!((g_fn(FRAC_PI_2).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((g_fn(PI).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(g_fn(0.0).unwrap(), 0.0);
        assert_eq!(rho_fn(0.0).unwrap(), 1.0);
        assert!(rho_fn(PI).unwrap().abs() < 1e-16);
        assert!(g_fn(-0.1).is_err());
        assert!(rho_fn(3.2).is_err());
    }

    #[test]
    fn series_match_direct_formulas_at_threshold() {
        for &phi in &[0.999e-3_f64, 1.001e-3] {
            let direct_g = (2.0 * phi - (2.0 * phi).sin()) / (2.0 * phi * phi);
            let direct_rho = phi.sin() / phi;
            assert!((g_unchecked(phi) - direct_g).abs() / direct_g < 1e-9);
            assert!((rho_unchecked(phi) - direct_rho).abs() < 1e-15);
        }
        let phi = PI - 0.999e-3;
        assert!((rho_unchecked(phi) - phi.sin() / phi).abs() < 1e-15);
    }

    #[test]
    fn rho_inv_values() {
        assert_eq!(rho_inv(1.0).unwrap(), 0.0);
        assert!((rho_inv(0.0).unwrap() - PI).abs() < 1e-15);
        assert!((rho_inv(2.0 / PI).unwrap() - FRAC_PI_2).abs() < 1e-14);
        // mpmath bisection on sin φ / φ = 0.5
        assert!((rho_inv(0.5).unwrap() - 1.895_494_267_033_981).abs() < 1e-13);
        assert!(rho_inv(1.5).is_err());
        for i in 0..=1000 {
            let r = i as f64 / 1000.0;
            let phi = rho_inv(r).unwrap();
            assert!((rho_unchecked(phi) - r).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn h_reference_values() {
        assert!((h_fn(0.0).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!((h_fn(2.0 / PI).unwrap() - 2.0 / PI).abs() < 1e-12);
        assert!(h_fn(1.0).unwrap().abs() < 1e-12);
        // g(ρ⁻¹(0.5)) from the mpmath oracle
        assert!((h_fn(0.5).unwrap() - 0.611_719_740_986_440_4).abs() < 1e-12);
        assert!((h_prime(0.0).unwrap() - 2.0 / PI).abs() < 1e-12);
        assert!(h_prime(1.0).is_err());
        assert!(h_second(0.0).is_err() && h_second(1.0).is_err());
    }

    #[test]
    fn critical_point_values() {
        let (phi_c, r_c) = critical_point();
        assert!((phi_c * phi_c.sin() + phi_c.cos()).abs() < 1e-12);
        assert!((phi_c - 2.798_386_045_783_887).abs() < 1e-12);
        assert!((r_c - 0.120_250_891_554_218).abs() < 1e-12);
        assert!(r_c < 2.0 / PI);
        assert!(h_second(r_c - 1e-4).unwrap() > 0.0);
        assert!(h_second(r_c + 1e-4).unwrap() < 0.0);
    }

    #[test]
    fn ball_profile_values() {
        let r = 0.37;
        assert_eq!(ball_profile(1.0, r).unwrap(), h_fn(r).unwrap());
        assert!((ball_profile(0.5, 0.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((ball_profile(2.0, 1.0).unwrap() - 2.446_878_963_945_761).abs() < 1e-11);
        assert!(ball_profile(1.0, 1.1).is_err());
        assert!(ball_profile(-1.0, 0.0).is_err());
    }

    #[test]
    fn psi_is_strictly_increasing() {
        let mut prev = 0.0;
        for i in 1..10_000 {
            let phi = PI * i as f64 / 10_000.0;
            let v = psi(phi);
            assert!(v > prev, "psi not increasing at {phi}");
            prev = v;
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // The steps are small enough for the (1 − r)^{-7/2} growth of the
        // fourth derivative near r = 0.99.
        let (step1, step2) = (1e-6, 4e-7);
        let mut worst1: f64 = 0.0;
        let mut worst2: f64 = 0.0;
        for i in 0..=980 {
            let r = 0.01 + i as f64 * 1e-3;
            let fd1 = (h_unchecked(r + step1) - h_unchecked(r - step1)) / (2.0 * step1);
            worst1 = worst1.max((fd1 - h_prime(r).unwrap()).abs());
            let fd2 =
                (h_prime_unchecked(r + step2) - h_prime_unchecked(r - step2)) / (2.0 * step2);
            worst2 = worst2.max((fd2 - h_second(r).unwrap()).abs());
        }
        assert!(worst1 <= 1e-6, "h' worst {worst1}");
        assert!(worst2 <= 1e-6, "h'' worst {worst2}");
    }
}
