//! Eyelid-fold consistency toolkit: shared-topology eyelid meshes, template
//! blending and crease sharpening, the hoodedness metric, profile
//! statistics and the annotation workflow.

pub mod annotation;
pub mod blend;
pub mod curve;
pub mod error;
pub mod mesh;
pub mod metric;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod tables;

pub use error::{Error, Result};
pub use mesh::{Mesh, TopologyDescriptor};
