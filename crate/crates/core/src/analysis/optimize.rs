//! Coordinate ascent on symmetric profiles under a diameter budget.
//!
//! For a rotationally invariant, plane-symmetric body with profile `u` on
//! `[0, 1/2]`, the farthest pair between the fibres over radii `r` and `r'`
//! sits on opposite sides, and diameter ≤ 1 reduces to
//! `u(r) + u(r') ≤ m(r, r') = min_θ [h(‖w_θ‖) − 2 r r' sin θ]` with
//! `‖w_θ‖² = r² + r'² − 2 r r' cos θ`. Raising one node as far as possible is
//! then `u_i = min_j (m_ij − u_j)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ratio::{iso_ratio, RatioReport};
use crate::canonical::{a_grid, l_profile};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::profile::{ball_profile, h_unchecked};
use crate::roots::golden_max;
use crate::sets::{Body, ProfileSet, SearchConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerStart {
    /// `B̄(0, D/2)`.
    Ball,
    /// `A_D`.
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Profile intervals.
    pub m: usize,
    pub max_sweeps: usize,
    /// Stop once no node moves more than this (relative to `D²`).
    pub step_tol: f64,
    pub diameter_budget: f64,
    pub theta_samples: usize,
    pub golden_iters: usize,
    pub start: OptimizerStart,
    pub exec: Exec,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            m: 256,
            max_sweeps: 50,
            step_tol: 1e-10,
            diameter_budget: 1.0,
            theta_samples: 256,
            golden_iters: 40,
            start: OptimizerStart::Ball,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub max_move: f64,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    #[serde(skip)]
    pub profile: Option<ProfileSet>,
    pub report: RatioReport,
    pub trace: Vec<SweepRecord>,
    pub converged: bool,
    /// Largest move of any node when starting the last sweep.
    pub final_move: f64,
}

fn pair_margin(ri: f64, rj: f64, thetas: &[f64], iters: usize) -> f64 {
    let f = |th: f64| {
        let w = (ri * ri + rj * rj - 2.0 * ri * rj * th.cos()).max(0.0).sqrt();
        h_unchecked(w.min(1.0)) - 2.0 * ri * rj * th.sin()
    };
    let vals: Vec<f64> = thetas.iter().map(|&t| f(t)).collect();
    let k = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let lo = thetas[k.saturating_sub(1)];
    let hi = thetas[(k + 1).min(thetas.len() - 1)];
    let (_, neg) = golden_max(|t| -f(t), lo, hi, iters);
    vals[k].min(-neg)
}

pub fn optimize_profile(cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    if cfg.m < 8 || cfg.theta_samples < 3 || !(cfg.diameter_budget > 0.0) || !(cfg.step_tol >= 0.0) {
        return Err(Error::InvalidSet("optimizer needs m ≥ 8, ≥ 3 angles, a positive budget".into()));
    }
    // Work at diameter 1 and dilate at the end.
    let r = a_grid(1.0, cfg.m);
    let nodes = r.len();
    let thetas: Vec<f64> = (0..cfg.theta_samples).map(|k| PI * k as f64 / (cfg.theta_samples - 1) as f64).collect();
    let rows = map_indexed(cfg.exec, nodes, |i| {
        (0..nodes).map(|j| if j < i { f64::NAN } else { pair_margin(r[i], r[j], &thetas, cfg.golden_iters) }).collect::<Vec<f64>>()
    });
    let margin = |i: usize, j: usize| if j >= i { rows[i][j] } else { rows[j][i] };

    let mut u: Vec<f64> = match cfg.start {
        OptimizerStart::Ball => r.iter().map(|&x| ball_profile(0.5, x.min(0.5)).unwrap_or(0.0)).collect(),
        OptimizerStart::A => r.iter().map(|&x| l_profile(1.0, x).unwrap()).collect(),
    };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut final_move = f64::INFINITY;
    for sweep in 1..=cfg.max_sweeps {
        let mut max_move: f64 = 0.0;
        for i in (0..nodes).rev() {
            let mut cap = 0.5 * margin(i, i);
            for (j, &uj) in u.iter().enumerate() {
                if j != i {
                    cap = cap.min(margin(i, j) - uj);
                }
            }
            let new = cap.max(0.0);
            max_move = max_move.max((new - u[i]).abs());
            u[i] = new;
        }
        let volume = ProfileSet::new(1, r.clone(), u.clone())?.volume();
        trace.push(SweepRecord { sweep, max_move, volume });
        final_move = max_move;
        if max_move <= cfg.step_tol {
            converged = true;
            break;
        }
    }
    let d = cfg.diameter_budget;
    let profile = ProfileSet::new(1, r, u)?.dilate(d)?;
    for rec in trace.iter_mut() {
        rec.max_move *= d * d;
        rec.volume *= d.powi(4);
    }
    let search = SearchConfig { exec: cfg.exec, ..Default::default() };
    let report = iso_ratio(&Body::Profile(profile.clone()), &search)?;
    Ok(OptimizeResult { profile: Some(profile), report, trace, converged, final_move: final_move * d * d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_from_a1_on_a_small_grid() {
        let cfg = OptimizerConfig { m: 32, max_sweeps: 3, start: OptimizerStart::A, ..Default::default() };
        let res = optimize_profile(&cfg).unwrap();
        assert!(res.trace[0].max_move < 1e-6, "{}", res.trace[0].max_move);
    }

    #[test]
    fn volume_trace_is_monotone_from_the_ball() {
        let cfg = OptimizerConfig { m: 32, max_sweeps: 10, ..Default::default() };
        let res = optimize_profile(&cfg).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1].volume >= w[0].volume - 1e-12);
        }
        let p = res.profile.unwrap();
        for (x, y) in p.radii().iter().zip(p.heights()) {
            assert!((y - l_profile(1.0, *x).unwrap()).abs() < 5e-3);
        }
    }
}
