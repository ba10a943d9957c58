use serde::{Deserialize, Serialize};

use super::profile_set::ProfileSet;
use super::search::{profile_diameter, profile_max_dist, profile_nc_check, DiameterReport, NcReport, SearchConfig};
use super::section_set::SectionSet;
use crate::error::{Error, Result};
use crate::point::Point;

/// Either set representation.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Profile(ProfileSet),
    Sections(SectionSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Profile,
    Sections,
}

impl Body {
    pub fn kind(&self) -> BodyKind {
        match self {
            Body::Profile(_) => BodyKind::Profile,
            Body::Sections(_) => BodyKind::Sections,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Body::Profile(p) => p.n(),
            Body::Sections(s) => s.n(),
        }
    }

    /// Profile nodes or fibres.
    pub fn size(&self) -> usize {
        match self {
            Body::Profile(p) => p.radii().len(),
            Body::Sections(s) => s.len(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Body::Profile(p) => p.volume(),
            Body::Sections(s) => s.volume(),
        }
    }

    pub fn diameter(&self, cfg: &SearchConfig) -> Result<DiameterReport> {
        match self {
            Body::Profile(p) => profile_diameter(p, cfg),
            Body::Sections(s) => s.diameter(cfg.exec),
        }
    }

    pub fn nc_check(&self, diam_hint: Option<f64>, cfg: &SearchConfig) -> Result<NcReport> {
        match self {
            Body::Profile(p) => profile_nc_check(p, diam_hint, cfg),
            Body::Sections(s) => s.nc_check(diam_hint, cfg),
        }
    }

    pub fn max_dist_from_point(&self, p: &Point, cfg: &SearchConfig) -> Result<(f64, Point)> {
        match self {
            Body::Profile(s) => profile_max_dist(s, p, cfg),
            Body::Sections(s) => s.max_dist_from_point(p),
        }
    }

    pub fn dilate(&self, lambda: f64) -> Result<Body> {
        Ok(match self {
            Body::Profile(p) => Body::Profile(p.dilate(lambda)?),
            Body::Sections(s) => Body::Sections(s.dilate(lambda)?),
        })
    }

    /// Parses a profile CSV or a section JSON document, chosen by the first
    /// non-blank character. `n` applies to profiles; JSON carries its own.
    pub fn parse(n: usize, text: &str) -> Result<Body> {
        match text.trim_start().chars().next() {
            Some('{') => Ok(Body::Sections(SectionSet::from_json(text)?)),
            Some(_) => Ok(Body::Profile(ProfileSet::from_csv(n, text)?)),
            None => Err(Error::Parse("empty set file".into())),
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            Body::Profile(p) => p.to_csv(),
            Body::Sections(s) => s.to_json(),
        }
    }
}
