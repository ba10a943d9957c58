//! Isodiametric ratios, comparisons, the symmetric profile optimizer and
//! the claim verification suite.

mod optimize;
mod ratio;
mod verify;

pub use optimize::{optimize_profile, OptimizeResult, OptimizerConfig, OptimizerStart, SweepRecord};
pub use ratio::{compare, iso_ratio, CompareReport, Larger, RatioDiagnostics, RatioReport};
pub use verify::{verify_suite, ClaimResult, VerifyLevel, VerifyReport};
