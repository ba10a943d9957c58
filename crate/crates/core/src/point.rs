//! Group algebra on the Heisenberg group `Hⁿ = Cⁿ × R`.
//!
//! A point `[z, t]` is stored flat as `(x₁..xₙ, y₁..yₙ, t)` with
//! `z_j = x_j + i y_j`. The group law is
//! `[z,t]·[z',t'] = [z + z', t + t' + 2 Im Σ z_j conj(z'_j)]`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

/// `Σ_j Im(z_j · conj(w_j))` for flat horizontal vectors `(x.., y..)`.
#[inline]
pub fn im_dot(z: &[f64], w: &[f64]) -> f64 {
    let n = z.len() / 2;
    let mut acc = 0.0;
    for j in 0..n {
        acc += z[n + j] * w[j] - z[j] * w[n + j];
    }
    acc
}

#[inline]
pub fn horizontal_norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Distance between two flat horizontal vectors.
#[inline]
pub fn horizontal_gap(z: &[f64], w: &[f64]) -> f64 {
    z.iter()
        .zip(w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn complex_to_flat(z: &[Complex64]) -> Vec<f64> {
    let mut out: Vec<f64> = z.iter().map(|c| c.re).collect();
    out.extend(z.iter().map(|c| c.im));
    out
}

pub fn flat_to_complex(z: &[f64]) -> Vec<Complex64> {
    let n = z.len() / 2;
    (0..n).map(|j| Complex64::new(z[j], z[n + j])).collect()
}

impl Point {
    /// The identity `[0, 0]` of `Hⁿ`.
    pub fn origin(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Point {
            coords: vec![0.0; 2 * n + 1],
        }
    }

    pub fn new(x: &[f64], y: &[f64], t: f64) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: x.len().max(1),
                found: y.len(),
            });
        }
        let mut coords = Vec::with_capacity(2 * x.len() + 1);
        coords.extend_from_slice(x);
        coords.extend_from_slice(y);
        coords.push(t);
        Self::from_flat(coords)
    }

    pub fn from_complex(z: &[Complex64], t: f64) -> Result<Self> {
        let mut coords = complex_to_flat(z);
        coords.push(t);
        Self::from_flat(coords)
    }

    /// `[z, t]` from a flat horizontal part `(x.., y..)`.
    pub fn from_horizontal(z: &[f64], t: f64) -> Result<Self> {
        let mut coords = z.to_vec();
        coords.push(t);
        Self::from_flat(coords)
    }

    /// Planar shorthand for `n = 1`.
    pub fn planar(x: f64, y: f64, t: f64) -> Self {
        Point {
            coords: vec![x, y, t],
        }
    }

    /// Builds a point from `(x.., y.., t)`; the length must be odd and at least 3.
    pub fn from_flat(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(Error::Parse(format!(
                "point needs 2n+1 >= 3 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point { coords })
    }

    pub fn n(&self) -> usize {
        (self.coords.len() - 1) / 2
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.n()]
    }

    pub fn y(&self) -> &[f64] {
        &self.coords[self.n()..2 * self.n()]
    }

    /// Horizontal part as a flat `(x.., y..)` slice.
    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..2 * self.n()]
    }

    pub fn t(&self) -> f64 {
        self.coords[2 * self.n()]
    }

    pub fn z_norm(&self) -> f64 {
        horizontal_norm(self.horizontal())
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.n() != other.n() {
            Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            })
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, other: &Point) -> Result<Point> {
        self.check_dim(other)?;
        let m = 2 * self.n();
        let mut coords = Vec::with_capacity(m + 1);
        for j in 0..m {
            coords.push(self.coords[j] + other.coords[j]);
        }
        let twist = 2.0 * im_dot(self.horizontal(), other.horizontal());
        coords.push(self.t() + other.t() + twist);
        Ok(Point { coords })
    }

    pub fn inv(&self) -> Point {
        Point {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// The anisotropic dilation `[λz, λ²t]`.
    pub fn dilate(&self, lambda: f64) -> Result<Point> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain {
                what: "dilation factor",
                value: lambda,
                domain: "[0, inf)",
            });
        }
        let m = 2 * self.n();
        let mut coords: Vec<f64> = self.coords[..m].iter().map(|c| lambda * c).collect();
        coords.push(lambda * lambda * self.t());
        Ok(Point { coords })
    }

    /// Per-coordinate phase rotation of `z`; `t` is untouched.
    pub fn rotate(&self, angles: &RotationAngles) -> Result<Point> {
        let n = self.n();
        if angles.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: angles.len(),
            });
        }
        let mut coords = self.coords.clone();
        for (j, &th) in angles.as_slice().iter().enumerate() {
            let (s, c) = th.sin_cos();
            let (x, y) = (self.coords[j], self.coords[n + j]);
            coords[j] = c * x - s * y;
            coords[n + j] = s * x + c * y;
        }
        Ok(Point { coords })
    }

    /// `σ([z,t]) = [z̄, t]`.
    pub fn sigma(&self) -> Point {
        let n = self.n();
        let mut coords = self.coords.clone();
        for c in &mut coords[n..2 * n] {
            *c = -*c;
        }
        Point { coords }
    }

    /// `ι([z,t]) = [z̄, −t]`, an isometry of the CC distance.
    pub fn iota(&self) -> Point {
        let mut p = self.sigma();
        let k = 2 * self.n();
        p.coords[k] = -p.coords[k];
        p
    }

    /// Canonical projection onto `Cⁿ`.
    pub fn project(&self) -> Vec<Complex64> {
        flat_to_complex(self.horizontal())
    }

    /// `inv(self) · other`, the reduced pair used by every distance routine.
    pub fn left_offset(&self, other: &Point) -> Result<Point> {
        self.inv().mul(other)
    }

    pub fn to_csv_row(&self) -> String {
        self.coords
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_csv_row(row: &str) -> Result<Point> {
        let coords = row
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::from_flat(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::from_flat(coords).map_err(serde::de::Error::custom)
    }
}

/// Per-coordinate angles of a rotation `r_θ` about the t-axis, reduced to `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationAngles(Vec<f64>);

impl RotationAngles {
    pub fn new(angles: Vec<f64>) -> Self {
        RotationAngles(angles.into_iter().map(|a| a.rem_euclid(TAU)).collect())
    }

    pub fn uniform(n: usize, angle: f64) -> Self {
        Self::new(vec![angle; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn compose(&self, other: &RotationAngles) -> RotationAngles {
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn group_law_examples() {
        let i = Point::planar(0.0, 1.0, 0.0);
        let one = Point::planar(1.0, 0.0, 0.0);
        assert_eq!(i.mul(&one).unwrap(), Point::planar(1.0, 1.0, 2.0));

        let p = Point::planar(0.3, -1.2, 4.0);
        assert_eq!(Point::origin(1).mul(&p).unwrap(), p);
        let e = p.mul(&p.inv()).unwrap();
        assert!(e.as_flat().iter().all(|c| c.abs() <= 1e-14));
        assert_eq!(
            Point::planar(1.0, 1.0, 3.0).inv(),
            Point::planar(-1.0, -1.0, -3.0)
        );
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = Point::planar(1.0, 0.0, 0.0);
        let q = Point::origin(2);
        assert!(matches!(p.mul(&q), Err(Error::DimensionMismatch { .. })));
        assert!(p.rotate(&RotationAngles::uniform(2, 0.1)).is_err());
    }

    #[test]
    fn dilation() {
        let p = Point::planar(1.0, 0.0, 1.0);
        assert_eq!(p.dilate(2.0).unwrap(), Point::planar(2.0, 0.0, 4.0));
        assert_eq!(p.dilate(1.0).unwrap(), p);
        assert!(p.dilate(-1.0).is_err());
    }

    #[test]
    fn rotations_and_reflections() {
        let p = Point::planar(1.0, 0.0, 5.0);
        let q = p.rotate(&RotationAngles::uniform(1, PI)).unwrap();
        assert!((q.x()[0] + 1.0).abs() < 1e-15 && q.y()[0].abs() < 1e-15 && q.t() == 5.0);

        let r = Point::planar(0.0, 1.0, 2.0);
        assert_eq!(r.iota(), Point::planar(0.0, -1.0, -2.0));
        assert_eq!(r.sigma().sigma(), r);
        assert_eq!(r.iota().iota(), r);
    }

    #[test]
    fn angles_are_reduced() {
        let a = RotationAngles::new(vec![-PI / 2.0, 5.0 * PI]);
        assert!((a.as_slice()[0] - 1.5 * PI).abs() < 1e-12);
        assert!((a.as_slice()[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn json_and_csv() {
        let p = Point::new(&[1.0, 2.0], &[3.0, 4.0], 5.0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,2.0,3.0,4.0,5.0]");
        let back: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(Point::from_csv_row(&p.to_csv_row()).unwrap(), p);
        assert!(serde_json::from_str::<Point>("[1.0, 2.0]").is_err());
        assert!(Point::from_csv_row("1,nan,2").is_err());
    }

    #[test]
    fn projection() {
        let p = Point::new(&[1.0, 2.0], &[3.0, 4.0], 5.0).unwrap();
        let z = p.project();
        assert_eq!(z, vec![Complex64::new(1.0, 3.0), Complex64::new(2.0, 4.0)]);
        let q = Point::new(&[0.5, 0.0], &[-1.0, 2.0], 1.0).unwrap();
        let pq = p.mul(&q).unwrap().project();
        for j in 0..2 {
            assert_eq!(pq[j], z[j] + q.project()[j]);
        }
    }
}
