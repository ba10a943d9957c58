use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::profile_set::{sphere_area, ProfileSet};
use super::search::{DiameterReport, NcReport, NcSample, SearchConfig};
use crate::error::{Error, Result};
use crate::exec::{argmax_by_key, map_indexed, Exec};
use crate::metric::{certainly_within, distance_upper_bound, reduced_distance};
use crate::point::{horizontal_gap, im_dot, Point};
use crate::quadrature::{gauss_legendre, integrate_with};
use crate::roots::bisect;

/// A finite family of vertical fibres `{z_k} × (union of closed intervals)`.
///
/// Each `z_k` stands for a cell of horizontal measure `weights[k]`, so the
/// family also models a body whose volume is `Σ weight × section length`.
/// Distances and diameters are those of the actual union of segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSectionSet")]
pub struct SectionSet {
    n: usize,
    zsamples: Vec<Vec<f64>>,
    sections: Vec<Vec<[f64; 2]>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSectionSet {
    n: usize,
    zsamples: Vec<Vec<f64>>,
    sections: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawSectionSet> for SectionSet {
    type Error = Error;

    fn try_from(raw: RawSectionSet) -> Result<Self> {
        SectionSet::new(raw.n, raw.zsamples, raw.sections, raw.weights)
    }
}

/// Outer section bounds and the regularized set built from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelopes {
    pub f_plus: Vec<Option<f64>>,
    pub f_minus: Vec<Option<f64>>,
    /// Samples where `f⁺ − f⁻` exceeds the thickness threshold.
    pub in_u: Vec<bool>,
    /// `in_u` dilated by one cell.
    pub in_closure: Vec<bool>,
    pub ehat: SectionSet,
}

/// Median nearest-neighbour spacing, raised to the horizontal dimension.
fn inferred_weight(n: usize, z: &[Vec<f64>]) -> f64 {
    if z.len() < 2 {
        return 0.0;
    }
    let mut nn: Vec<f64> = (0..z.len())
        .map(|i| {
            (0..z.len())
                .filter(|&j| j != i)
                .map(|j| horizontal_gap(&z[i], &z[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2].powi(2 * n as i32)
}

impl SectionSet {
    pub fn new(
        n: usize,
        zsamples: Vec<Vec<f64>>,
        sections: Vec<Vec<[f64; 2]>>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSet("dimension n must be at least 1".into()));
        }
        if zsamples.len() != sections.len() {
            return Err(Error::InvalidSet(format!(
                "{} z-samples but {} section lists",
                zsamples.len(),
                sections.len()
            )));
        }
        for (k, z) in zsamples.iter().enumerate() {
            if z.len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, found: z.len() });
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("z-sample"));
            }
            let secs = &sections[k];
            for iv in secs {
                if !(iv[0].is_finite() && iv[1].is_finite()) {
                    return Err(Error::NonFinite("section bound"));
                }
                if iv[0] > iv[1] {
                    return Err(Error::InvalidSet(format!("z-sample {k}: interval {iv:?} is reversed")));
                }
            }
            if secs.windows(2).any(|w| !(w[0][1] < w[1][0])) {
                return Err(Error::InvalidSet(format!(
                    "z-sample {k}: intervals must be sorted and disjoint"
                )));
            }
        }
        let weights = match weights {
            Some(w) => {
                if w.len() != zsamples.len() {
                    return Err(Error::InvalidSet(format!(
                        "{} weights for {} z-samples",
                        w.len(),
                        zsamples.len()
                    )));
                }
                if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidSet("weights must be finite and nonnegative".into()));
                }
                w
            }
            None => vec![inferred_weight(n, &zsamples); zsamples.len()],
        };
        Ok(SectionSet { n, zsamples, sections, weights })
    }

    /// One vertical segment `{z} × [lo, hi]`.
    pub fn segment(z: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        let n = z.len() / 2;
        Self::new(n, vec![z], vec![vec![[lo, hi]]], Some(vec![0.0]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.zsamples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.iter().all(Vec::is_empty)
    }

    pub fn zsamples(&self) -> &[Vec<f64>] {
        &self.zsamples
    }

    pub fn sections(&self) -> &[Vec<[f64; 2]>] {
        &self.sections
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn section_length(&self, k: usize) -> f64 {
        self.sections[k].iter().map(|iv| iv[1] - iv[0]).sum()
    }

    pub fn volume(&self) -> f64 {
        (0..self.len()).map(|k| self.weights[k] * self.section_length(k)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("section sets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Interval endpoints as `(sample index, t)`; a degenerate interval
    /// contributes one point.
    fn endpoints(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (k, secs) in self.sections.iter().enumerate() {
            for iv in secs {
                out.push((k, iv[0]));
                if iv[1] > iv[0] {
                    out.push((k, iv[1]));
                }
            }
        }
        out
    }

    fn point(&self, k: usize, t: f64) -> Point {
        Point::from_horizontal(&self.zsamples[k], t).expect("valid sample")
    }

    /// Exact diameter of the union of segments: the distance to a fixed
    /// point grows with `|s|`, so the maximum sits at interval endpoints.
    pub fn diameter(&self, exec: Exec) -> Result<DiameterReport> {
        let ends = self.endpoints();
        if ends.is_empty() {
            return Err(Error::EmptySet);
        }
        // Tallest fibre, slightly discounted so its own pair is never pruned.
        let lower = self
            .sections
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| (PI * (s[s.len() - 1][1] - s[0][0])).sqrt())
            .fold(0.0, f64::max)
            * (1.0 - 1e-9);
        let z = &self.zsamples;
        let rows = map_indexed(exec, ends.len(), |i| {
            let (ki, ti) = ends[i];
            let mut best = (f64::NEG_INFINITY, i);
            for (j, &(kj, tj)) in ends.iter().enumerate().skip(i) {
                let w = horizontal_gap(&z[ki], &z[kj]);
                let s = tj - ti - 2.0 * im_dot(&z[ki], &z[kj]);
                let floor = best.0.max(lower);
                if distance_upper_bound(w, s) < floor || certainly_within(w, s, floor) {
                    continue;
                }
                let d = reduced_distance(w, s);
                if d > best.0 {
                    best = (d, j);
                }
            }
            best
        });
        let i = argmax_by_key(&rows, |r| r.0).ok_or(Error::EmptySet)?;
        let (value, j) = rows[i];
        Ok(DiameterReport {
            value,
            witness: (self.point(ends[i].0, ends[i].1), self.point(ends[j].0, ends[j].1)),
            iterations: ends.len() * (ends.len() + 1) / 2,
            refinement_level: 0,
            lower_witness_gap: 0.0,
        })
    }

    pub fn max_dist_from_point(&self, p: &Point) -> Result<(f64, Point)> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.n() });
        }
        let ends = self.endpoints();
        let dists: Vec<f64> = ends
            .iter()
            .map(|&(k, t)| {
                let z = &self.zsamples[k];
                let s = t - p.t() - 2.0 * im_dot(p.horizontal(), z);
                reduced_distance(horizontal_gap(p.horizontal(), z), s)
            })
            .collect();
        let i = argmax_by_key(&dists, |d| *d).ok_or(Error::EmptySet)?;
        Ok((dists[i], self.point(ends[i].0, ends[i].1)))
    }

    /// NC slack at (a stride of) the interval endpoints.
    pub fn nc_check(&self, diam_hint: Option<f64>, cfg: &SearchConfig) -> Result<NcReport> {
        let diameter = match diam_hint {
            Some(d) => d,
            None => self.diameter(cfg.exec)?.value,
        };
        let ends = self.endpoints();
        let stride = ends.len().div_ceil(cfg.nc_samples.max(1)).max(1);
        let picked: Vec<(usize, f64)> = ends.iter().copied().step_by(stride).collect();
        let res = map_indexed(cfg.exec, picked.len(), |i| {
            let p = self.point(picked[i].0, picked[i].1);
            self.max_dist_from_point(&p).map(|(m, _)| (p, m))
        });
        let mut samples = Vec::with_capacity(res.len());
        for r in res {
            let (point, max_distance) = r?;
            samples.push(NcSample { point, max_distance, slack: diameter - max_distance });
        }
        NcReport::from_samples(diameter, samples)
    }

    /// Replaces every nonempty section by its `[min, max]` hull.
    pub fn t_convex_hull(&self) -> SectionSet {
        let sections = self
            .sections
            .iter()
            .map(|s| match (s.first(), s.last()) {
                (Some(a), Some(b)) => vec![[a[0], b[1]]],
                _ => Vec::new(),
            })
            .collect();
        SectionSet { sections, ..self.clone() }
    }

    /// Replaces every nonempty section by the centred interval of equal length.
    pub fn steiner_symmetrize(&self) -> SectionSet {
        let sections = (0..self.len())
            .map(|k| {
                if self.sections[k].is_empty() {
                    Vec::new()
                } else {
                    let half = 0.5 * self.section_length(k);
                    vec![[-half, half]]
                }
            })
            .collect();
        SectionSet { sections, ..self.clone() }
    }

    /// `[z, t] ↦ [λz, λ²t]`.
    pub fn dilate(&self, lambda: f64) -> Result<SectionSet> {
        if !(lambda > 0.0) {
            return Err(Error::Domain { what: "dilation factor", value: lambda, domain: "(0, inf)" });
        }
        let l2 = lambda * lambda;
        Ok(SectionSet {
            n: self.n,
            zsamples: self.zsamples.iter().map(|z| z.iter().map(|v| lambda * v).collect()).collect(),
            sections: self
                .sections
                .iter()
                .map(|s| s.iter().map(|iv| [l2 * iv[0], l2 * iv[1]]).collect())
                .collect(),
            weights: self.weights.iter().map(|w| w * lambda.powi(2 * self.n as i32)).collect(),
        })
    }

    /// `thickness_rel` is relative to the vertical extent of the set.
    pub fn envelopes(&self, thickness_rel: f64) -> Envelopes {
        let f_plus: Vec<Option<f64>> = self.sections.iter().map(|s| s.last().map(|iv| iv[1])).collect();
        let f_minus: Vec<Option<f64>> = self.sections.iter().map(|s| s.first().map(|iv| iv[0])).collect();
        let top = f_plus.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bottom = f_minus.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        let eps = if top > bottom { thickness_rel * (top - bottom) } else { 0.0 };
        let in_u: Vec<bool> = (0..self.len())
            .map(|k| matches!((f_minus[k], f_plus[k]), (Some(a), Some(b)) if b - a > eps))
            .collect();
        let cell: Vec<f64> = self.weights.iter().map(|w| w.powf(1.0 / (2 * self.n) as f64)).collect();
        let in_closure: Vec<bool> = (0..self.len())
            .map(|j| {
                in_u[j]
                    || (0..self.len()).any(|i| {
                        in_u[i]
                            && horizontal_gap(&self.zsamples[i], &self.zsamples[j])
                                <= 1.5 * cell[i].max(cell[j])
                    })
            })
            .collect();
        let keep: Vec<usize> = (0..self.len()).filter(|&k| in_closure[k] && f_plus[k].is_some()).collect();
        let ehat = SectionSet {
            n: self.n,
            zsamples: keep.iter().map(|&k| self.zsamples[k].clone()).collect(),
            sections: keep.iter().map(|&k| vec![[f_minus[k].unwrap(), f_plus[k].unwrap()]]).collect(),
            weights: keep.iter().map(|&k| self.weights[k]).collect(),
        };
        Envelopes { f_plus, f_minus, in_u, in_closure, ehat }
    }

    /// Applies `f` to every section bound, sample by sample.
    pub fn map_sections<F: Fn(&[f64], [f64; 2]) -> [f64; 2]>(&self, f: F) -> Result<SectionSet> {
        let sections = self
            .sections
            .iter()
            .zip(&self.zsamples)
            .map(|(s, z)| s.iter().map(|iv| f(z, *iv)).collect())
            .collect();
        SectionSet::new(self.n, self.zsamples.clone(), sections, Some(self.weights.clone()))
    }
}

/// Samples a profile body on about `zcount` fibres.
///
/// The horizontal ball of radius `R` is cut into concentric shells; each
/// shell gets a number of cells proportional to its measure, and every cell
/// carries the section `[−ū, ū]` where `ū` is the shell average of `u`. The
/// fibre sits at a radius where `u` takes that average, so volume is
/// preserved up to quadrature round-off and samples lie on the body.
pub fn profile_to_sections(set: &ProfileSet, zcount: usize) -> Result<SectionSet> {
    let n = set.n();
    let big_r = set.radius();
    let rings = ((zcount as f64 / PI).sqrt().round() as usize).max(1);
    let pow = (2 * n - 1) as i32;
    let rule = gauss_legendre(n + 3);
    let integrate = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        let mut cuts = vec![a];
        cuts.extend(set.radii().iter().copied().filter(|&r| r > a && r < b));
        cuts.push(b);
        cuts.windows(2).map(|w| integrate_with(&rule, w[0], w[1], f)).sum()
    };
    let shell_total = sphere_area(n) * big_r.powi(2 * n as i32) / (2 * n) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_c710);
    let (mut zs, mut secs, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..rings {
        let a = big_r * k as f64 / rings as f64;
        let b = big_r * (k + 1) as f64 / rings as f64;
        let shell = sphere_area(n) * (b.powi(2 * n as i32) - a.powi(2 * n as i32)) / (2 * n) as f64;
        let mass = integrate(a, b, &|r| set.eval(r) * r.powi(pow));
        let avg = mass * sphere_area(n) / shell;
        let count = if k == 0 {
            1
        } else if n == 1 {
            2 * ((PI * (a + b) / (b - a) / 2.0).round() as usize).max(1)
        } else {
            2 * ((zcount as f64 * shell / shell_total / 2.0).round() as usize).max(1)
        };
        let radius = if k == 0 {
            0.0
        } else {
            mean_value_radius(set, a, b, avg)
        };
        for j in 0..count {
            let dir: Vec<f64> = if n == 1 {
                let ang = 2.0 * PI * j as f64 / count as f64;
                vec![ang.cos(), ang.sin()]
            } else {
                let v: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            };
            zs.push(dir.into_iter().map(|d| d * radius).collect());
            secs.push(vec![[-avg, avg]]);
            weights.push(shell / count as f64);
        }
    }
    SectionSet::new(n, zs, secs, Some(weights))
}

fn mean_value_radius(set: &ProfileSet, a: f64, b: f64, avg: f64) -> f64 {
    let f = |r: f64| set.eval(r) - avg;
    let m = 32;
    let pts: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    for w in pts.windows(2) {
        if f(w[0]) == 0.0 {
            return w[0];
        }
        if f(w[0]) * f(w[1]) < 0.0 {
            return bisect(f, w[0], w[1], 1e-15).unwrap_or(w[0]);
        }
    }
    *pts.iter().min_by(|x, y| f(**x).abs().total_cmp(&f(**y).abs())).unwrap()
}

/// Parameters of the random σ-invariant generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSetSpec {
    pub n: usize,
    /// Number of conjugate pairs `(z, z̄)`.
    pub pairs: usize,
    pub max_intervals: usize,
    pub radius: f64,
    pub height: f64,
}

impl Default for RandomSetSpec {
    fn default() -> Self {
        RandomSetSpec { n: 1, pairs: 60, max_intervals: 3, radius: 1.0, height: 0.5 }
    }
}

/// A random section set invariant under `σ[z, t] = [z̄, t]`: fibres come in
/// conjugate pairs carrying identical sections.
pub fn random_sigma_invariant(shape: &RandomSetSpec, seed: u64) -> Result<SectionSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.n;
    let cell = sphere_area(n) * shape.radius.powi(2 * n as i32) / (2 * n) as f64 / (2 * shape.pairs) as f64;
    let (mut zs, mut secs) = (Vec::new(), Vec::new());
    for _ in 0..shape.pairs {
        let z: Vec<f64> = loop {
            let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-shape.radius..shape.radius)).collect();
            if v.iter().map(|x| x * x).sum::<f64>() <= shape.radius * shape.radius {
                break v;
            }
        };
        let m = rng.gen_range(1..=shape.max_intervals.max(1));
        let mut ts: Vec<f64> = (0..2 * m).map(|_| rng.gen_range(-shape.height..shape.height)).collect();
        ts.sort_by(f64::total_cmp);
        let s: Vec<[f64; 2]> = ts.chunks(2).map(|c| [c[0], c[1]]).collect();
        let mut zbar = z.clone();
        for y in zbar[n..].iter_mut() {
            *y = -*y;
        }
        zs.push(z);
        secs.push(s.clone());
        zs.push(zbar);
        secs.push(s);
    }
    let count = zs.len();
    SectionSet::new(n, zs, secs, Some(vec![cell; count]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::distance;

    #[test]
    fn json_round_trip_and_inferred_weights() {
        let text = r#"{"n":1,"zsamples":[[0,0],[0.1,0],[0,0.1]],"sections":[[[-1,1]],[[0,0.5],[0.7,0.8]],[]]}"#;
        let s = SectionSet::from_json(text).unwrap();
        assert!((s.weights()[0] - 0.01).abs() < 1e-15);
        assert!((s.volume() - 0.01 * 2.6).abs() < 1e-12);
        assert_eq!(SectionSet::from_json(&s.to_json()).unwrap(), s);
        let bad = r#"{"n":1,"zsamples":[[0,0]],"sections":[[[0,1],[0.5,2]]]}"#;
        assert!(SectionSet::from_json(bad).is_err());
    }

    #[test]
    fn hull_and_symmetrization_examples() {
        let s = SectionSet::new(1, vec![vec![0.0, 0.0]], vec![vec![[1.0, 1.0], [3.0, 3.0]]], None).unwrap();
        assert_eq!(s.t_convex_hull().sections()[0], vec![[1.0, 3.0]]);
        let s = SectionSet::segment(vec![0.0, 0.0], 1.0, 3.0).unwrap();
        assert_eq!(s.steiner_symmetrize().sections()[0], vec![[-1.0, 1.0]]);
    }

    #[test]
    fn segment_diameter_and_envelopes() {
        let a = 0.4;
        let s = SectionSet::segment(vec![0.3, -0.2], -a, a).unwrap();
        let d = s.diameter(Exec::Sequential).unwrap();
        assert!((d.value - (2.0 * PI * a).sqrt()).abs() < 1e-14);
        let env = s.envelopes(1e-9);
        assert_eq!(env.in_u, vec![true]);
        assert_eq!(env.f_plus, vec![Some(a)]);
        assert_eq!(env.f_minus, vec![Some(-a)]);
    }

    #[test]
    fn ball_sections_round_trip_volume() {
        let b = ProfileSet::ball(1, 1.0, 512).unwrap();
        let s = profile_to_sections(&b, 10_000).unwrap();
        assert!((s.volume() / b.volume() - 1.0).abs() < 1e-10);
        assert_eq!(s.t_convex_hull(), s);
        assert_eq!(s.steiner_symmetrize(), s);
        let env = s.envelopes(1e-9);
        assert!((env.ehat.volume() - s.volume()).abs() < 1e-14);
        for (z, sec) in s.zsamples().iter().zip(s.sections()) {
            let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
            if r > 0.0 {
                assert!((b.eval(r) - sec[0][1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn section_diameter_matches_profile_ball() {
        let b = ProfileSet::ball(1, 1.0, 256).unwrap();
        let s = profile_to_sections(&b, 2000).unwrap();
        let d = s.diameter(Exec::Parallel).unwrap();
        assert!(d.value <= 2.0 + 1e-9 && d.value > 1.99, "{}", d.value);
        let (p, q) = &d.witness;
        assert!((distance(p, q).unwrap() - d.value).abs() < 1e-12);
    }

    #[test]
    fn higher_dimensional_sections_keep_volume() {
        let b = ProfileSet::ball(2, 1.0, 256).unwrap();
        let s = profile_to_sections(&b, 3000).unwrap();
        assert!((s.volume() / b.volume() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_sets_are_sigma_invariant() {
        let s = random_sigma_invariant(&RandomSetSpec::default(), 7).unwrap();
        for k in (0..s.len()).step_by(2) {
            let (a, b) = (&s.zsamples()[k], &s.zsamples()[k + 1]);
            assert_eq!(a[0], b[0]);
            assert_eq!(a[1], -b[1]);
            assert_eq!(s.sections()[k], s.sections()[k + 1]);
        }
        let st = s.steiner_symmetrize();
        assert_eq!(st.volume(), s.volume());
    }

    #[test]
    fn dilation_scales_sections() {
        let s = random_sigma_invariant(&RandomSetSpec { pairs: 10, ..Default::default() }, 3).unwrap();
        let d = s.dilate(2.0).unwrap();
        assert!((d.volume() - 16.0 * s.volume()).abs() < 1e-12);
        let (a, b) = (s.diameter(Exec::Sequential).unwrap(), d.diameter(Exec::Sequential).unwrap());
        assert!((b.value - 2.0 * a.value).abs() < 1e-12);
        assert_eq!(s.dilate(1.0).unwrap(), s);
    }
}
