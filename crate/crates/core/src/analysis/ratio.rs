use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sets::{Body, BodyKind, SearchConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioDiagnostics {
    pub kind: BodyKind,
    pub n: usize,
    /// Profile nodes or fibres.
    pub size: usize,
    pub grid_r: usize,
    pub grid_theta: usize,
    pub starts: usize,
    pub lower_witness_gap: f64,
}

/// `volume / diameter^{2n+2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub volume: f64,
    pub diameter: f64,
    pub ratio: f64,
    pub diagnostics: RatioDiagnostics,
}

pub fn iso_ratio(body: &Body, cfg: &SearchConfig) -> Result<RatioReport> {
    let diam = body.diameter(cfg)?;
    let volume = body.volume();
    Ok(RatioReport {
        volume,
        diameter: diam.value,
        ratio: volume / diam.value.powi(2 * body.n() as i32 + 2),
        diagnostics: RatioDiagnostics {
            kind: body.kind(),
            n: body.n(),
            size: body.size(),
            grid_r: cfg.grid_r,
            grid_theta: cfg.grid_theta,
            starts: cfg.starts,
            lower_witness_gap: diam.lower_witness_gap,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Larger {
    A,
    B,
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: RatioReport,
    pub b: RatioReport,
    /// `ratio(a) − ratio(b)`.
    pub difference: f64,
    /// `ratio(a)/ratio(b) − 1`.
    pub relative_margin: f64,
    pub larger: Larger,
    pub tolerance: f64,
}

/// Ranks two bodies by isodiametric ratio; margins within `tolerance`
/// (relative) count as equal.
pub fn compare(a: &Body, b: &Body, cfg: &SearchConfig, tolerance: f64) -> Result<CompareReport> {
    let ra = iso_ratio(a, cfg)?;
    let rb = iso_ratio(b, cfg)?;
    let relative_margin = ra.ratio / rb.ratio - 1.0;
    let larger = if relative_margin.abs() <= tolerance {
        Larger::Equal
    } else if relative_margin > 0.0 {
        Larger::A
    } else {
        Larger::B
    };
    Ok(CompareReport {
        difference: ra.ratio - rb.ratio,
        relative_margin,
        larger,
        tolerance,
        a: ra,
        b: rb,
    })
}
