//! Numerical geometry of the sub-Riemannian Heisenberg group `Hⁿ`:
//! Carnot-Carathéodory distances and balls, compact-set models with volume
//! and diameter, vertical convexification and Steiner symmetrization, the
//! isodiametric candidates `A_λ` with their perturbations, and tools that
//! search for and verify isodiametric maximizers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod canonical;
pub mod constants;
pub mod error;
pub mod exec;
pub mod metric;
pub mod point;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod sets;

pub use error::{Error, Result};
pub use exec::Exec;
pub use metric::{distance, distance_with, DistanceMethod, Side};
pub use point::{Point, RotationAngles};
