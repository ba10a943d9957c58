//! The bodies `A_λ`, their boundary antipodes, and the perturbations
//! `A_{λ,f}` that share volume and diameter with `A_λ`.
//!
//! `A_λ` is the cylinder `{‖z‖ ≤ λ/π, 2π|t| ≤ λ²}` joined to the part of the
//! ball `B̄(0, λ/2)` with `‖z‖ ≥ λ/π`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::metric::distance;
use crate::point::{horizontal_norm, Point};
use crate::profile::{ball_profile, g_unchecked, h_unchecked};
use crate::roots::bisect;
use crate::sets::{edge_clustered_grid, profile_to_sections, uniform_grid, ProfileSet, SectionSet};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "lambda", value: lambda, domain: "(0, inf)" })
    }
}

/// Upper profile of `A_λ`.
pub fn l_profile(lambda: f64, r: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(0.0..=0.5 * lambda * (1.0 + 1e-12)).contains(&r) {
        return Err(Error::Domain { what: "r", value: r, domain: "[0, lambda/2]" });
    }
    if r <= lambda / PI {
        Ok(lambda * lambda / (2.0 * PI))
    } else {
        ball_profile(0.5 * lambda, r.min(0.5 * lambda))
    }
}

/// Profile nodes for `A_λ`: a quarter uniform on the cylinder, the rest
/// clustered toward the rim.
pub fn a_grid(lambda: f64, grid_size: usize) -> Vec<f64> {
    let m = grid_size.max(8);
    let inner = (m / 4).max(1);
    let mut grid = uniform_grid(0.0, lambda / PI, inner);
    grid.pop();
    grid.extend(edge_clustered_grid(lambda / PI, 0.5 * lambda, m - inner));
    grid
}

pub fn build_a(lambda: f64, grid_size: usize) -> Result<ProfileSet> {
    build_a_n(1, lambda, grid_size)
}

pub fn build_a_n(n: usize, lambda: f64, grid_size: usize) -> Result<ProfileSet> {
    check_lambda(lambda)?;
    let grid = a_grid(lambda, grid_size);
    let u = grid.iter().map(|&r| l_profile(lambda, r)).collect::<Result<Vec<_>>>()?;
    ProfileSet::new(n, grid, u)
}

/// Largest positive second difference of `l_λ` on the cap, normalized by
/// the squared spacing. Zero when the sampled cap profile is concave.
pub fn cap_concavity_defect(lambda: f64, samples: usize) -> f64 {
    let grid = uniform_grid(lambda / PI, 0.5 * lambda, samples.max(3));
    let h = grid[1] - grid[0];
    let u: Vec<f64> = grid.iter().map(|&r| l_profile(lambda, r).unwrap()).collect();
    u.windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) / (h * h))
        .fold(0.0, f64::max)
}

/// Diametral partner of a point on the spherical part of `∂A_λ`:
/// `[e^{i(π+2φ)} z, −t]`, with `φ` read off from `t = g(φ) (λ/2)²`.
pub fn antipode(lambda: f64, p: &Point) -> Result<Point> {
    check_lambda(lambda)?;
    let r = p.z_norm();
    let tol = 1e-12 * lambda;
    if !(r > lambda / PI && r <= 0.5 * lambda + tol) {
        return Err(Error::Domain {
            what: "|z| of antipode argument",
            value: r,
            domain: "(lambda/pi, lambda/2]",
        });
    }
    let target = p.t().abs() / (0.25 * lambda * lambda);
    if target > 2.0 / PI + 1e-12 {
        return Err(Error::Domain { what: "t of antipode argument", value: p.t(), domain: "cap heights" });
    }
    let phi = if target == 0.0 {
        0.0
    } else {
        bisect(|f| g_unchecked(f) - target, 0.0, 0.5 * PI, 1e-15)?
    };
    let phi = phi.copysign(p.t());
    let rot = Complex64::from_polar(1.0, PI + 2.0 * phi);
    let z: Vec<Complex64> = p.project().into_iter().map(|c| rot * c).collect();
    Point::from_complex(&z, -p.t())
}

/// Constants controlling which bumps keep `A_{λ,f}` of diameter `λ`.
/// They are scale free: a bump for `A_λ` is measured against `λ·r_adm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityConstants {
    pub kappa: f64,
    pub rbar1: f64,
    pub rhat: f64,
    pub r_adm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityConfig {
    /// Samples of `K` per side (upper and lower).
    pub k_samples: usize,
    pub safety: f64,
    pub exec: Exec,
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        AdmissibilityConfig { k_samples: 2048, safety: 0.95, exec: Exec::default() }
    }
}

/// First radius where `|h(r) − h(0) − h′(0) r| ≤ (κ/2) r` fails.
fn linearization_break() -> f64 {
    let kappa = 1.0 / PI;
    let defect = |r: f64| (h_unchecked(r) - 1.0 / PI - 2.0 * kappa * r).abs() - 0.5 * kappa * r;
    let m = 4000;
    for k in 1..=m {
        let r = k as f64 / m as f64;
        if defect(r) > 0.0 {
            let lo = (k - 1) as f64 / m as f64;
            return bisect(defect, lo.max(1e-9), r, 1e-14).unwrap_or(lo);
        }
    }
    1.0
}

pub fn admissibility(lambda: f64, cfg: &AdmissibilityConfig) -> Result<AdmissibilityConstants> {
    check_lambda(lambda)?;
    let kappa = 1.0 / PI;
    // The perturbation argument also needs r̄ < 1/π.
    let rbar1 = (0.5 * linearization_break()).min(0.99 / PI);
    let p0 = Point::planar(0.0, 0.0, 1.0 / (2.0 * PI));
    let p0_inv = p0.inv();
    let radii = uniform_grid(rbar1, 0.5, cfg.k_samples.max(2) - 1);
    let margins = map_indexed(cfg.exec, radii.len(), |i| {
        let r = radii[i];
        let u = l_profile(1.0, r).unwrap();
        [u, -u]
            .iter()
            .map(|&t| {
                let q = Point::planar(r, 0.0, t);
                let d = distance(&p0, &q).unwrap().max(distance(&p0_inv, &q).unwrap());
                1.0 - d
            })
            .fold(f64::INFINITY, f64::min)
    });
    let rhat = cfg.safety * margins.into_iter().fold(f64::INFINITY, f64::min).max(0.0);
    if !(rhat > 0.0) {
        return Err(Error::Inadmissible("no positive margin on the sampled boundary".into()));
    }
    let r_adm = rbar1.min(2.0 * rhat / PI).min(kappa / 4.0);
    Ok(AdmissibilityConstants { kappa, rbar1, rhat, r_adm })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    /// `a·max(0, 1 − ‖z‖/s)`.
    RadialCone,
    /// `a·max(0, 1 − ‖z − z₀‖/s)`.
    OffcenterCone,
    /// Piecewise-linear radial table `(ρ, f)` about `center`, zero past the
    /// last node.
    CustomSamples(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub center: Vec<Complex64>,
    pub support_radius: f64,
    pub lipschitz: f64,
    pub amplitude: f64,
}

impl BumpSpec {
    /// A radial cone using `fraction` of the admissible support and 90% of
    /// the Lipschitz budget, with sign `sign`.
    pub fn radial(n: usize, lambda: f64, adm: &AdmissibilityConstants, fraction: f64, sign: f64) -> Self {
        let support = fraction * lambda * adm.r_adm * (1.0 - 1e-9);
        let lipschitz = 0.9 * PI * lambda * adm.r_adm / 4.0;
        BumpSpec {
            kind: BumpKind::RadialCone,
            center: vec![Complex64::new(0.0, 0.0); n],
            support_radius: support,
            lipschitz,
            amplitude: sign.signum() * lipschitz * support,
        }
    }

    /// An off-center cone centred at `offset·λ·r_adm·e^{iα}` along `e₁`,
    /// with the largest support that stays admissible.
    pub fn offcenter(n: usize, lambda: f64, adm: &AdmissibilityConstants, offset: f64, angle: f64, sign: f64) -> Self {
        let reach = lambda * adm.r_adm;
        let mut center = vec![Complex64::new(0.0, 0.0); n];
        center[0] = Complex64::from_polar(offset * reach, angle);
        let support = (1.0 - offset) * reach * (1.0 - 1e-9);
        let lipschitz = 0.9 * PI * lambda * adm.r_adm / 4.0;
        BumpSpec {
            kind: BumpKind::OffcenterCone,
            center,
            support_radius: support,
            lipschitz,
            amplitude: sign.signum() * lipschitz * support,
        }
    }

    fn center_flat(&self) -> Vec<f64> {
        crate::point::complex_to_flat(&self.center)
    }

    /// Value of the bump at the flat horizontal point `z`.
    pub fn eval(&self, z: &[f64]) -> f64 {
        let c = self.center_flat();
        let dist = if c.len() == z.len() {
            crate::point::horizontal_gap(z, &c)
        } else {
            horizontal_norm(z)
        };
        match &self.kind {
            BumpKind::RadialCone => {
                let d = horizontal_norm(z);
                self.amplitude * (1.0 - d / self.support_radius).max(0.0)
            }
            BumpKind::OffcenterCone => self.amplitude * (1.0 - dist / self.support_radius).max(0.0),
            BumpKind::CustomSamples(table) => {
                let k = table.partition_point(|p| p[0] <= dist);
                if k == 0 {
                    table.first().map_or(0.0, |p| p[1])
                } else if k == table.len() {
                    0.0
                } else {
                    let (a, b) = (table[k - 1], table[k]);
                    a[1] + (b[1] - a[1]) * (dist - a[0]) / (b[0] - a[0])
                }
            }
        }
    }

    /// Checks the bump against the admissibility constants; the error names
    /// the first violated constraint.
    pub fn validate(&self, lambda: f64, adm: &AdmissibilityConstants) -> Result<()> {
        let reach = lambda * adm.r_adm;
        let budget = PI * lambda * adm.r_adm / 4.0;
        if !(self.support_radius > 0.0 && self.lipschitz > 0.0) {
            return Err(Error::Inadmissible("support radius and Lipschitz constant must be positive".into()));
        }
        let c_norm = match self.kind {
            BumpKind::RadialCone => 0.0,
            _ => horizontal_norm(&self.center_flat()),
        };
        if c_norm + self.support_radius >= reach {
            return Err(Error::Inadmissible(format!(
                "support reaches |z| = {:.6e}, must stay below lambda*r_adm = {reach:.6e}",
                c_norm + self.support_radius
            )));
        }
        if self.lipschitz >= budget {
            return Err(Error::Inadmissible(format!(
                "Lipschitz constant {:.6e} is not below pi*lambda*r_adm/4 = {budget:.6e}",
                self.lipschitz
            )));
        }
        let actual = match &self.kind {
            BumpKind::CustomSamples(t) => {
                if t.windows(2).any(|w| !(w[1][0] > w[0][0])) || t.last().is_none_or(|p| p[1] != 0.0) {
                    return Err(Error::Inadmissible(
                        "custom table needs increasing radii and a final zero".into(),
                    ));
                }
                if t.last().unwrap()[0] > self.support_radius {
                    return Err(Error::Inadmissible("custom table exceeds the declared support".into()));
                }
                t.windows(2).map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs()).fold(0.0, f64::max)
            }
            _ => self.amplitude.abs() / self.support_radius,
        };
        if actual > self.lipschitz * (1.0 + 1e-12) {
            return Err(Error::Inadmissible(format!(
                "bump slope {actual:.6e} exceeds its declared Lipschitz constant {:.6e}",
                self.lipschitz
            )));
        }
        Ok(())
    }
}

/// `A_{λ,f}` sampled on about `zcount` fibres: the sections of `A_λ` over
/// the cylinder `‖z‖ ≤ λ/π` are shifted by `f(z)`.
pub fn build_a_perturbed(
    lambda: f64,
    bump: &BumpSpec,
    adm: &AdmissibilityConstants,
    grid_size: usize,
    zcount: usize,
) -> Result<SectionSet> {
    check_lambda(lambda)?;
    bump.validate(lambda, adm)?;
    let n = bump.center.len().max(1);
    let base = profile_to_sections(&build_a_n(n, lambda, grid_size)?, zcount)?;
    base.map_sections(|z, iv| {
        if horizontal_norm(z) <= lambda / PI {
            let f = bump.eval(z);
            [iv[0] + f, iv[1] + f]
        } else {
            iv
        }
    })
}
