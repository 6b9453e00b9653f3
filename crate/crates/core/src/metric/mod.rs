//! Eyelid shape metric: hoodedness profiles, profile error, cumulative error
//! distributions and per-group summaries.

mod cdf;
mod groups;
mod hoodedness;

pub use cdf::{error_cdf, ErrorCdf};
pub use groups::{group_errors, GroupSummary};
pub use hoodedness::{
    hoodedness_from_projected, hoodedness_profile, projected_loops, shape_error, shape_errors_by_id, t_grid,
    HoodednessProfile, ShapeError, DEFAULT_PROFILE_SAMPLES, FRAME_EPSILON,
};
