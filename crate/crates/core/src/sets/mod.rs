//! Compact-set models: rotationally invariant profile bodies and finite
//! families of vertical sections.

mod body;
mod profile_set;
mod search;
mod section_set;

pub use body::{Body, BodyKind};
pub use profile_set::{edge_clustered_grid, sphere_area, uniform_grid, ProfileSet};
pub use search::{
    profile_boundary_samples, profile_diameter, profile_max_dist, profile_nc_check,
    DiameterReport, NcReport, NcSample, SearchConfig,
};
pub use section_set::{
    profile_to_sections, random_sigma_invariant, Envelopes, RandomSetSpec, SectionSet,
};
