//! Diversity statistics over hoodedness profiles: a diagonal-covariance
//! Gaussian mixture for fitting and sampling profile vectors, and per-t
//! mean / standard deviation summaries.

mod gmm;
mod profiles;

pub use gmm::{
    gmm_fit, gmm_sample, gmm_sample_labeled, Gmm, GmmFit, CONVERGENCE_TOLERANCE, MAX_ITERATIONS, VARIANCE_FLOOR,
};
pub use profiles::{
    diversity_report, matrix_to_profiles, profile_stats, profiles_to_matrix, DiversityReport, DiversityRow,
    ProfileStats,
};
