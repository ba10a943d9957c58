use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_with};

/// A rotationally invariant, plane-symmetric body
/// `{‖z‖ ≤ R, |t| ≤ u(‖z‖)}` with `u` sampled on `0 = r₀ < … < r_m = R`
/// and interpolated by a monotone piecewise cubic (PCHIP).
///
/// Such a body is t-convex and equals its own Steiner symmetrization.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSet {
    n: usize,
    r: Vec<f64>,
    u: Vec<f64>,
    slopes: Vec<f64>,
}

/// Euclidean area of the unit sphere in `R^{2n}`: `2 πⁿ / (n−1)!`.
pub fn sphere_area(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

/// Nodes on `[a, b]` clustered toward `b` as `a + (b − a) sin(π/2 · k/m)`.
/// Square-root cusps at `b` become smooth in the node index.
pub fn edge_clustered_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 1);
    let mut out: Vec<f64> = (0..=m)
        .map(|k| a + (b - a) * (FRAC_PI_2 * k as f64 / m as f64).sin())
        .collect();
    out[m] = b;
    out
}

pub fn uniform_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 1);
    let mut out: Vec<f64> = (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect();
    out[m] = b;
    out
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len();
    if m == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..m - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; m];
    for k in 1..m - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() || d0 == 0.0 {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[m - 1] = end(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
    d
}

impl ProfileSet {
    pub fn new(n: usize, r: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSet("dimension n must be at least 1".into()));
        }
        if r.len() != u.len() || r.len() < 2 {
            return Err(Error::InvalidSet(format!(
                "profile needs matching r/u columns with at least 2 rows (got {} and {})",
                r.len(),
                u.len()
            )));
        }
        if r[0] != 0.0 {
            return Err(Error::InvalidSet(format!("profile grid must start at r = 0, got {}", r[0])));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSet("profile radii must be strictly increasing".into()));
        }
        if r.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile samples"));
        }
        if let Some(bad) = u.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidSet(format!("negative profile height {bad}")));
        }
        let slopes = pchip_slopes(&r, &u);
        Ok(ProfileSet { n, r, u, slopes })
    }

    /// Samples `f` on `grid`, clamping tiny negative values to zero.
    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, grid: Vec<f64>, f: F) -> Result<Self> {
        let u = grid.iter().map(|&r| f(r).max(0.0)).collect();
        Self::new(n, grid, u)
    }

    /// The closed ball `B̄(0, radius)`.
    pub fn ball(n: usize, radius: f64, m: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain {
                what: "radius",
                value: radius,
                domain: "(0, inf)",
            });
        }
        let grid = edge_clustered_grid(0.0, radius, m);
        Self::from_fn(n, grid, |r| {
            crate::profile::ball_profile(radius, r.min(radius)).unwrap_or(0.0)
        })
    }

    /// `{‖z‖ ≤ radius, |t| ≤ half_height}`.
    pub fn cylinder(n: usize, radius: f64, half_height: f64) -> Result<Self> {
        Self::new(n, vec![0.0, radius], vec![half_height, half_height])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn heights(&self) -> &[f64] {
        &self.u
    }

    pub fn max_height(&self) -> f64 {
        self.u.iter().cloned().fold(0.0, f64::max)
    }

    /// Interpolated profile; zero outside `[0, R]`.
    pub fn eval(&self, r: f64) -> f64 {
        let m = self.r.len();
        if !(r >= 0.0) || r > self.radius() {
            return 0.0;
        }
        let k = self.r.partition_point(|&x| x <= r).clamp(1, m - 1) - 1;
        let h = self.r[k + 1] - self.r[k];
        let s = (r - self.r[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (h00 * self.u[k] + h10 * h * self.slopes[k] + h01 * self.u[k + 1] + h11 * h * self.slopes[k + 1])
            .max(0.0)
    }

    /// Lebesgue measure `s_{2n−1} ∫₀^R 2u(r) r^{2n−1} dr`, exact for the
    /// piecewise cubic interpolant.
    pub fn volume(&self) -> f64 {
        let rule = gauss_legendre(self.n + 3);
        let pow = (2 * self.n - 1) as i32;
        let total: f64 = self
            .r
            .windows(2)
            .map(|w| integrate_with(&rule, w[0], w[1], |r| 2.0 * self.eval(r) * r.powi(pow)))
            .sum();
        sphere_area(self.n) * total
    }

    /// `δ_λ` applied to the body: `r → λr`, `u → λ²u`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain {
                what: "dilation factor",
                value: lambda,
                domain: "(0, inf)",
            });
        }
        Ok(ProfileSet {
            n: self.n,
            r: self.r.iter().map(|r| lambda * r).collect(),
            u: self.u.iter().map(|u| lambda * lambda * u).collect(),
            slopes: self.slopes.iter().map(|d| lambda * d).collect(),
        })
    }

    /// CSV with header `r,u`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u\n");
        for (r, u) in self.r.iter().zip(&self.u) {
            out.push_str(&format!("{r:e},{u:e}\n"));
        }
        out
    }

    /// Reads `r,u` columns; further columns are ignored.
    pub fn from_csv(n: usize, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty profile file".into()))?;
        let cols: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if cols.len() < 2 || cols[0] != "r" || cols[1] != "u" {
            return Err(Error::Parse(format!("expected header `r,u`, found `{header}`")));
        }
        let (mut r, mut u) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {name}", i + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: bad {name}: {e}", i + 2)))
            };
            r.push(next("r")?);
            u.push(next("u")?);
        }
        Self::new(n, r, u)
    }
}
