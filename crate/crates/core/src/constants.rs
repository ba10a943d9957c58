//! Constants of the cone and bicone lemmas for balls `B̄(0, d)`.
//!
//! * `r̄(d, δ)`: root of `h_d = δ` on the decreasing branch `[2d/π, d]`;
//!   beyond it the ball is thinner than `δ`.
//! * `α(d, δ)`: Lipschitz constant of `h_d` on `[0, r̄]`.
//! * `M(d, δ)`: Lipschitz constant of `h_d` on `[0, (d + r̄)/2]`.
//! * `γ(C, d, δ) = min((d − r̄)/2, δ/(2C + 2d + M))`.
//! * `β(C, d, δ) = α + 2C`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{critical_point, g_unchecked, h_prime_unchecked, rho_unchecked};
use crate::roots::bisect;

const LIPSCHITZ_GRID: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub c: f64,
    pub d: f64,
    pub delta: f64,
    pub alpha: f64,
    pub rbar: f64,
    pub m: f64,
    pub gamma: f64,
    pub beta: f64,
}

fn validate(d: f64, delta: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain {
            what: "d",
            value: d,
            domain: "(0, inf)",
        });
    }
    let peak = 2.0 * d * d / PI;
    if !(delta > 0.0) || delta > peak {
        return Err(Error::Domain {
            what: "delta",
            value: delta,
            domain: "(0, 2 d^2 / pi]",
        });
    }
    Ok(())
}

/// `r̄(d, δ)`: the point of the decreasing branch where `h_d = δ`.
pub fn thin_radius(d: f64, delta: f64) -> Result<f64> {
    validate(d, delta)?;
    // On [2d/π, d] the profile is g(φ) d² at radius ρ(φ) d with φ ∈ [0, π/2].
    let level = (delta / (d * d)).min(2.0 / PI);
    let phi = bisect(|p| g_unchecked(p) - level, 0.0, FRAC_PI_2, 1e-16)?;
    Ok(d * rho_unchecked(phi))
}

/// `sup |h'|` on `[0, x]` for `x < 1`, from the closed form.
///
/// `h'` increases up to the inflection `r_c` and decreases afterwards, so the
/// supremum is attained at `min(x, r_c)` or `x`; a uniform grid is added as a
/// cross-check.
fn sup_abs_h_prime(x: f64) -> f64 {
    let (_, r_c) = critical_point();
    let mut best = h_prime_unchecked(0.0).abs();
    best = best.max(h_prime_unchecked(x.min(r_c)).abs());
    best = best.max(h_prime_unchecked(x).abs());
    for i in 1..LIPSCHITZ_GRID {
        let r = x * i as f64 / LIPSCHITZ_GRID as f64;
        best = best.max(h_prime_unchecked(r).abs());
    }
    best
}

/// Lipschitz constant of `h_d` on `[0, r]`, `r < d`.
pub fn profile_lipschitz(d: f64, r: f64) -> f64 {
    d * sup_abs_h_prime((r / d).clamp(0.0, 1.0 - 1e-15))
}

/// Cone constant `α(d, δ)`: any `[w, s]` with `s > t_p + α ‖w − z_p‖` above a
/// sphere point `p` with `t_p ≥ δ` lies outside `B̄(0, d)`.
pub fn cone_alpha(d: f64, delta: f64) -> Result<f64> {
    let rbar = thin_radius(d, delta)?;
    Ok(profile_lipschitz(d, rbar))
}

pub fn lemma_constants(c: f64, d: f64, delta: f64) -> Result<LemmaConstants> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Domain {
            what: "C",
            value: c,
            domain: "[0, inf)",
        });
    }
    let root = thin_radius(d, delta)?;
    let rbar = root.max(0.5 * d * (1.0 + 1e-9));
    let alpha = profile_lipschitz(d, rbar);
    let m = profile_lipschitz(d, 0.5 * (d + rbar));
    let gamma = (0.5 * (d - rbar)).min(delta / (2.0 * c + 2.0 * d + m));
    Ok(LemmaConstants {
        c,
        d,
        delta,
        alpha,
        rbar,
        m,
        gamma,
        beta: alpha + 2.0 * c,
    })
}
