//! Grid-plus-multistart maximization of distances over profile bodies.
//!
//! A boundary point of a profile body is `[r·(a e^{iθ} e₁ + √(1−a²) e₂), ±u(r)]`.
//! After a unitary change of frame, any pair of boundary points is described
//! by `(r_p, r_q, θ, a)` and two sides; for `n = 1` the parameter `a` is 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile_set::{uniform_grid, ProfileSet};
use crate::error::{Error, Result};
use crate::exec::{argmax_by_key, map_indexed, Exec};
use crate::metric::{certainly_within, distance, distance_upper_bound, reduced_distance};
use crate::point::Point;
use crate::roots::golden_max;

/// Grid and refinement settings shared by diameter and NC searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_r: usize,
    pub grid_theta: usize,
    /// Samples of the inner-product modulus `a ∈ [0, 1]`; ignored for `n = 1`.
    pub grid_c: usize,
    pub starts: usize,
    pub rounds: usize,
    pub golden_iters: usize,
    /// Boundary samples examined by the NC check.
    pub nc_samples: usize,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_r: 128,
            grid_theta: 64,
            grid_c: 16,
            starts: 16,
            rounds: 6,
            golden_iters: 40,
            nc_samples: 64,
            exec: Exec::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub value: f64,
    pub witness: (Point, Point),
    /// Objective evaluations spent in local refinement.
    pub iterations: usize,
    pub refinement_level: usize,
    pub lower_witness_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcSample {
    pub point: Point,
    pub max_distance: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcReport {
    pub diameter: f64,
    pub samples: Vec<NcSample>,
    pub worst_point: Point,
    pub worst_slack: f64,
}

impl NcReport {
    pub(crate) fn from_samples(diameter: f64, samples: Vec<NcSample>) -> Result<Self> {
        let worst = argmax_by_key(&samples, |s| s.slack).ok_or(Error::EmptySet)?;
        Ok(NcReport {
            diameter,
            worst_point: samples[worst].point.clone(),
            worst_slack: samples[worst].slack,
            samples,
        })
    }
}

/// Pair coordinates `(r_p, r_q, θ, a)`.
type Coords = [f64; 4];

#[derive(Clone, Copy, Debug)]
struct Candidate {
    value: f64,
    cell: [usize; 4],
    sides: (f64, f64),
}

/// Keeps the `k` largest candidates, earliest first among equals.
struct TopK {
    k: usize,
    items: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK { k, items: Vec::with_capacity(k + 1) }
    }

    fn threshold(&self) -> f64 {
        if self.items.len() < self.k {
            f64::NEG_INFINITY
        } else {
            self.items[self.k - 1].value
        }
    }

    fn push(&mut self, c: Candidate) {
        if self.items.len() == self.k && c.value <= self.threshold() {
            return;
        }
        let pos = self.items.partition_point(|x| x.value >= c.value);
        self.items.insert(pos, c);
        self.items.truncate(self.k);
    }
}

fn boundary_point(n: usize, r: f64, theta: f64, a: f64, t: f64) -> Point {
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    z[0] = Complex64::from_polar(r * a, theta);
    if n > 1 {
        z[1] = Complex64::new(r * (1.0 - a * a).max(0.0).sqrt(), 0.0);
    }
    Point::from_complex(&z, t).expect("finite boundary point")
}

fn pair_distance(set: &ProfileSet, x: &Coords, sides: (f64, f64)) -> f64 {
    let [rp, rq, theta, a] = *x;
    let w2 = rp * rp + rq * rq - 2.0 * rp * rq * a * theta.cos();
    let s = sides.1 * set.eval(rq) - sides.0 * set.eval(rp) + 2.0 * rp * rq * a * theta.sin();
    reduced_distance(w2.max(0.0).sqrt(), s)
}

/// Cyclic golden-section refinement of `f` inside the box `[lo, hi]`,
/// coordinates listed in `active`. Returns the best point, value, and the
/// number of evaluations.
fn refine<F: Fn(&Coords) -> f64>(
    f: F,
    mut x: Coords,
    lo: Coords,
    hi: Coords,
    active: &[usize],
    rounds: usize,
    iters: usize,
) -> (Coords, f64, usize) {
    let mut best = f(&x);
    let mut evals = 1;
    for _ in 0..rounds {
        let before = best;
        for &c in active {
            if hi[c] <= lo[c] {
                continue;
            }
            let (arg, val) = golden_max(
                |v| {
                    let mut y = x;
                    y[c] = v;
                    f(&y)
                },
                lo[c],
                hi[c],
                iters,
            );
            evals += iters + 2;
            if val > best {
                best = val;
                x[c] = arg;
            }
        }
        if best - before <= 1e-15 * best.abs() {
            break;
        }
    }
    (x, best, evals)
}

/// Selects up to `k` candidates, skipping any within one cell of a chosen one.
fn spread_starts(mut all: Vec<Candidate>, k: usize) -> Vec<Candidate> {
    all.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut chosen: Vec<Candidate> = Vec::with_capacity(k);
    for c in all {
        if chosen.len() == k {
            break;
        }
        let near = chosen.iter().any(|d| {
            d.sides == c.sides && d.cell.iter().zip(&c.cell).all(|(a, b)| a.abs_diff(*b) <= 1)
        });
        if !near {
            chosen.push(c);
        }
    }
    chosen
}

fn theta_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    uniform_grid(lo, hi, m.max(2) - 1)
}

fn box_around(grid: &[f64], i: usize) -> (f64, f64) {
    (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)])
}

const SIDES: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Diameter of a profile body.
pub fn profile_diameter(set: &ProfileSet, cfg: &SearchConfig) -> Result<DiameterReport> {
    let n = set.n();
    let big_r = set.radius();
    let rg = uniform_grid(0.0, big_r, cfg.grid_r.max(2) - 1);
    let ug: Vec<f64> = rg.iter().map(|&r| set.eval(r)).collect();
    let tg = theta_grid(0.0, PI, cfg.grid_theta);
    let trig: Vec<(f64, f64)> = tg.iter().map(|t| (t.cos(), t.sin())).collect();
    let ag = if n == 1 { vec![1.0] } else { uniform_grid(0.0, 1.0, cfg.grid_c.max(2) - 1) };
    let lower = (2.0 * big_r).max((2.0 * PI * set.max_height()).sqrt());
    let k = cfg.starts.max(1);

    let rows = map_indexed(cfg.exec, rg.len(), |i| {
        let mut top = TopK::new(k);
        let rp = rg[i];
        for j in i..rg.len() {
            let rq = rg[j];
            for (kt, &(c, s)) in trig.iter().enumerate() {
                for (ka, &a) in ag.iter().enumerate() {
                    let w = (rp * rp + rq * rq - 2.0 * rp * rq * a * c).max(0.0).sqrt();
                    let cross = 2.0 * rp * rq * a * s;
                    for &sides in &SIDES {
                        let sv = sides.1 * ug[j] - sides.0 * ug[i] + cross;
                        let floor = top.threshold().max(lower * (1.0 - 1e-9));
                        if distance_upper_bound(w, sv) < floor || certainly_within(w, sv, floor) {
                            continue;
                        }
                        let value = reduced_distance(w, sv);
                        top.push(Candidate { value, cell: [i, j, kt, ka], sides });
                    }
                }
            }
        }
        top.items
    });
    let starts = spread_starts(rows.into_iter().flatten().collect(), k);

    let active: &[usize] = if n == 1 { &[0, 1, 2] } else { &[0, 1, 2, 3] };
    let refined = map_indexed(cfg.exec, starts.len(), |si| {
        let c = starts[si];
        let x0 = [rg[c.cell[0]], rg[c.cell[1]], tg[c.cell[2]], ag[c.cell[3]]];
        let (r0, r1) = box_around(&rg, c.cell[0]);
        let (q0, q1) = box_around(&rg, c.cell[1]);
        let (t0, t1) = box_around(&tg, c.cell[2]);
        let (a0, a1) = box_around(&ag, c.cell[3]);
        let (x, v, evals) = refine(
            |x| pair_distance(set, x, c.sides),
            x0,
            [r0, q0, t0, a0],
            [r1, q1, t1, a1],
            active,
            cfg.rounds,
            cfg.golden_iters,
        );
        (x, v.max(c.value), c.sides, evals)
    });

    // Fallback witnesses: horizontal antipodes and the tallest vertical pair.
    let imax = argmax_by_key(&ug, |u| *u).unwrap_or(0);
    let mut pool: Vec<(Coords, f64, (f64, f64), usize)> = vec![
        ([big_r, big_r, PI, 1.0], 0.0, (1.0, 1.0), 0),
        ([rg[imax], rg[imax], 0.0, 1.0], 0.0, (-1.0, 1.0), 0),
    ];
    for p in pool.iter_mut() {
        p.1 = pair_distance(set, &p.0, p.2);
    }
    pool.extend(refined);
    let iterations = pool.iter().map(|p| p.3).sum();
    let best = argmax_by_key(&pool, |p| p.1).ok_or(Error::EmptySet)?;
    let (x, value, sides, _) = pool[best];
    let p = boundary_point(n, x[0], 0.0, 1.0, sides.0 * set.eval(x[0]));
    let q = boundary_point(n, x[1], x[2], x[3], sides.1 * set.eval(x[1]));
    let exact = distance(&p, &q)?;
    let value = value.max(exact);
    Ok(DiameterReport {
        value,
        lower_witness_gap: value - exact,
        witness: (p, q),
        iterations,
        refinement_level: cfg.rounds,
    })
}

/// `max_{q ∈ ∂E} d(p, q)` for a profile body `E` and any point `p`.
pub fn profile_max_dist(set: &ProfileSet, p: &Point, cfg: &SearchConfig) -> Result<(f64, Point)> {
    let n = set.n();
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.n() });
    }
    // Frame with e₁ along z_p; the body is ι-invariant, so take t_p ≥ 0.
    let flip = p.t() < 0.0;
    let reflected = if flip { p.iota() } else { p.clone() };
    let zp = reflected.project();
    let rp = p.z_norm();
    let tp = reflected.t();
    let big_r = set.radius();
    let rg = uniform_grid(0.0, big_r, cfg.grid_r.max(2) - 1);
    let ug: Vec<f64> = rg.iter().map(|&r| set.eval(r)).collect();
    let tg = theta_grid(-PI, PI, 2 * cfg.grid_theta);
    let ag = if n == 1 { vec![1.0] } else { uniform_grid(0.0, 1.0, cfg.grid_c.max(2) - 1) };

    let objective = |x: &Coords, side: f64| {
        let [_, rq, theta, a] = *x;
        let w2 = rp * rp + rq * rq - 2.0 * rp * rq * a * theta.cos();
        let s = side * set.eval(rq) - tp + 2.0 * rp * rq * a * theta.sin();
        reduced_distance(w2.max(0.0).sqrt(), s)
    };

    let k = cfg.starts.max(1);
    let rows = map_indexed(cfg.exec, rg.len(), |j| {
        let mut top = TopK::new(k);
        let rq = rg[j];
        for (kt, &theta) in tg.iter().enumerate() {
            let (sn, cs) = theta.sin_cos();
            for (ka, &a) in ag.iter().enumerate() {
                let w = (rp * rp + rq * rq - 2.0 * rp * rq * a * cs).max(0.0).sqrt();
                let cross = 2.0 * rp * rq * a * sn;
                for side in [1.0, -1.0] {
                    let s = side * ug[j] - tp + cross;
                    let floor = top.threshold();
                    if distance_upper_bound(w, s) < floor || certainly_within(w, s, floor) {
                        continue;
                    }
                    let value = reduced_distance(w, s);
                    top.push(Candidate { value, cell: [0, j, kt, ka], sides: (1.0, side) });
                }
            }
        }
        top.items
    });
    let starts = spread_starts(rows.into_iter().flatten().collect(), k);
    if starts.is_empty() {
        return Err(Error::EmptySet);
    }
    let active: &[usize] = if n == 1 { &[1, 2] } else { &[1, 2, 3] };
    let refined = map_indexed(cfg.exec, starts.len(), |si| {
        let c = starts[si];
        let x0 = [rp, rg[c.cell[1]], tg[c.cell[2]], ag[c.cell[3]]];
        let (q0, q1) = box_around(&rg, c.cell[1]);
        let (t0, t1) = box_around(&tg, c.cell[2]);
        let (a0, a1) = box_around(&ag, c.cell[3]);
        let (x, v, _) = refine(
            |x| objective(x, c.sides.1),
            x0,
            [rp, q0, t0, a0],
            [rp, q1, t1, a1],
            active,
            cfg.rounds,
            cfg.golden_iters,
        );
        (x, v.max(c.value), c.sides.1)
    });
    let best = argmax_by_key(&refined, |r| r.1).ok_or(Error::EmptySet)?;
    let (x, value, side) = refined[best];

    // Map the witness back: e₁ ↦ ẑ_p, e₂ ↦ a unit vector orthogonal to ẑ_p.
    let (e1, e2) = frame(&zp);
    let rq = x[1];
    let a = x[3];
    let c1 = Complex64::from_polar(rq * a, x[2]);
    let c2 = rq * (1.0 - a * a).max(0.0).sqrt();
    let zq: Vec<Complex64> = (0..n).map(|k| c1 * e1[k] + c2 * e2[k]).collect();
    let tq = side * set.eval(rq);
    let mut q = Point::from_complex(&zq, tq)?;
    if flip {
        q = q.iota();
    }
    let exact = distance(p, &q)?;
    Ok((value.max(exact), q))
}

/// Unit vector along `z` (or `e₁`) and a Hermitian-orthogonal unit vector.
fn frame(z: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = z.len();
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut e1 = vec![Complex64::new(0.0, 0.0); n];
    if norm > 0.0 {
        for k in 0..n {
            e1[k] = z[k] / norm;
        }
    } else {
        e1[0] = Complex64::new(1.0, 0.0);
    }
    let mut e2 = vec![Complex64::new(0.0, 0.0); n];
    if n > 1 {
        let k = (0..n)
            .min_by(|&a, &b| e1[a].norm().total_cmp(&e1[b].norm()))
            .unwrap();
        e2[k] = Complex64::new(1.0, 0.0);
        let proj = e1[k].conj();
        for m in 0..n {
            e2[m] -= proj * e1[m];
        }
        let nn = e2.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in e2.iter_mut() {
            *c /= nn;
        }
    }
    (e1, e2)
}

/// Boundary samples of a profile body: top-surface points along `e₁`, plus
/// points on the side wall when `u(R) > 0`.
pub fn profile_boundary_samples(set: &ProfileSet, count: usize) -> Vec<Point> {
    let n = set.n();
    let big_r = set.radius();
    let mut out: Vec<Point> = uniform_grid(0.0, big_r, count.max(2) - 1)
        .into_iter()
        .map(|r| boundary_point(n, r, 0.0, 1.0, set.eval(r)))
        .collect();
    let top = set.eval(big_r);
    if top > 0.0 {
        for k in 0..4 {
            out.push(boundary_point(n, big_r, 0.0, 1.0, top * k as f64 / 4.0));
        }
    }
    out
}

pub fn profile_nc_check(
    set: &ProfileSet,
    diam_hint: Option<f64>,
    cfg: &SearchConfig,
) -> Result<NcReport> {
    let diameter = match diam_hint {
        Some(d) => d,
        None => profile_diameter(set, cfg)?.value,
    };
    let points = profile_boundary_samples(set, cfg.nc_samples);
    let inner = SearchConfig { exec: Exec::Sequential, ..*cfg };
    let results = map_indexed(cfg.exec, points.len(), |i| profile_max_dist(set, &points[i], &inner));
    let mut samples = Vec::with_capacity(points.len());
    for (point, res) in points.into_iter().zip(results) {
        let (max_distance, _) = res?;
        samples.push(NcSample { point, max_distance, slack: diameter - max_distance });
    }
    NcReport::from_samples(diameter, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SearchConfig {
        SearchConfig { grid_r: 48, grid_theta: 32, grid_c: 6, nc_samples: 16, ..Default::default() }
    }

    #[test]
    fn ball_diameter_is_twice_the_radius() {
        for &rad in &[0.5, 1.0, 2.0] {
            let b = ProfileSet::ball(1, rad, 256).unwrap();
            let rep = profile_diameter(&b, &small_cfg()).unwrap();
            assert!((rep.value - 2.0 * rad).abs() < 2e-3 * rad, "{}", rep.value);
            assert!(rep.lower_witness_gap >= 0.0);
        }
    }

    #[test]
    fn ball_diameter_in_higher_dimension() {
        let b = ProfileSet::ball(2, 1.0, 128).unwrap();
        let rep = profile_diameter(&b, &small_cfg()).unwrap();
        assert!((rep.value - 2.0).abs() < 2e-3, "{}", rep.value);
    }

    #[test]
    fn vertical_segment_diameter() {
        let a = 0.3;
        let seg = ProfileSet::cylinder(1, 1e-12, a).unwrap();
        let rep = profile_diameter(&seg, &small_cfg()).unwrap();
        assert!((rep.value - (2.0 * PI * a).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn max_distance_from_origin_and_pole() {
        let b = ProfileSet::ball(1, 1.0, 256).unwrap();
        let (v, q) = profile_max_dist(&b, &Point::origin(1), &small_cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
        assert!((distance(&Point::origin(1), &q).unwrap() - v).abs() < 1e-12);
        let pole = Point::planar(0.0, 0.0, 1.0 / PI);
        let (v, _) = profile_max_dist(&b, &pole, &small_cfg()).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn witness_is_mapped_back_for_generic_points() {
        let b = ProfileSet::ball(2, 1.0, 64).unwrap();
        let p = Point::from_flat(vec![0.2, -0.1, 0.3, 0.05, -0.07]).unwrap();
        let (v, q) = profile_max_dist(&b, &p, &small_cfg()).unwrap();
        assert!((distance(&p, &q).unwrap() - v).abs() < 1e-9);
        assert!((q.z_norm() - 1.0).abs() < 0.05 || q.t().abs() > 0.0);
    }

    #[test]
    fn ball_fails_nc_at_the_pole() {
        let b = ProfileSet::ball(1, 1.0, 256).unwrap();
        let rep = profile_nc_check(&b, None, &small_cfg()).unwrap();
        assert!(rep.worst_slack > 0.55, "{}", rep.worst_slack);
        assert!(rep.worst_point.z_norm() < 1e-12);
        let rim = rep.samples.last().unwrap();
        assert!(rim.slack.abs() < 2e-3);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let b = ProfileSet::ball(1, 1.0, 64).unwrap();
        let cfg = small_cfg();
        let a = profile_diameter(&b, &cfg.with_exec(Exec::Sequential)).unwrap();
        let c = profile_diameter(&b, &cfg.with_exec(Exec::Parallel)).unwrap();
        assert_eq!(a, c);
    }
}
