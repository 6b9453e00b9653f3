//! Triangle meshes in a fixed shared topology.
//!
//! Every mesh handled by the toolkit (templates, candidates, annotated
//! retopos, their mirrored copies) shares one vertex numbering and one face
//! list. The [`TopologyDescriptor`] names the eyelid loops and region masks
//! on top of that numbering.

mod mirror;
pub mod obj;
pub mod topology;

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use mirror::mirror_mesh;
pub use obj::{load_obj, save_obj};
pub use topology::{load_topology, TopologyDescriptor};

/// A triangle mesh: positions plus triangles indexing into them.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub name: String,
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh, rejecting faces that index past the vertex list.
    pub fn new(name: impl Into<String>, vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let len = vertices.len();
        if let Some(&index) = faces.iter().flatten().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        Ok(Self {
            name: name.into(),
            vertices,
            faces,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Same name and faces, new positions.
    pub fn with_vertices(&self, vertices: Vec<Vector3<f64>>) -> Mesh {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        Mesh {
            name: self.name.clone(),
            vertices,
            faces: self.faces.clone(),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Mesh {
        self.name = name.into();
        self
    }

    /// Largest absolute coordinate difference against another mesh with the
    /// same vertex count. Returns infinity on a count mismatch.
    pub fn max_coord_diff(&self, other: &Mesh) -> f64 {
        if self.vertices.len() != other.vertices.len() {
            return f64::INFINITY;
        }
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    /// One-ring vertex adjacency derived from the faces.
    pub fn vertex_neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut rings = vec![BTreeSet::new(); self.vertices.len()];
        for &[a, b, c] in &self.faces {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                rings[p].insert(q);
                rings[q].insert(p);
            }
        }
        rings
    }
}

/// A single reason a mesh does not satisfy the shared-topology contract.
#[derive(Clone, Debug, PartialEq)]
pub enum TopologyViolation {
    CountMismatch { expected: usize, actual: usize },
    NonFiniteVertex(usize),
    FaceIndexOutOfRange { face: usize, index: usize },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::CountMismatch { expected, actual } => {
                write!(f, "vertex count mismatch: expected {expected}, got {actual}")
            }
            TopologyViolation::NonFiniteVertex(v) => write!(f, "vertex {v} is not finite"),
            TopologyViolation::FaceIndexOutOfRange { face, index } => {
                write!(f, "face {face} references missing vertex {index}")
            }
        }
    }
}

/// Checks a mesh against a topology descriptor. An empty list means the mesh
/// can be used wherever the descriptor is.
pub fn validate_topology(mesh: &Mesh, topo: &TopologyDescriptor) -> Vec<TopologyViolation> {
    let mut violations = Vec::new();
    if mesh.vertex_count() != topo.vertex_count {
        violations.push(TopologyViolation::CountMismatch {
            expected: topo.vertex_count,
            actual: mesh.vertex_count(),
        });
    }
    for (v, p) in mesh.vertices.iter().enumerate() {
        if !p.iter().all(|c| c.is_finite()) {
            violations.push(TopologyViolation::NonFiniteVertex(v));
        }
    }
    for (fi, face) in mesh.faces.iter().enumerate() {
        for &index in face {
            if index >= mesh.vertex_count() {
                violations.push(TopologyViolation::FaceIndexOutOfRange { face: fi, index });
            }
        }
    }
    violations
}
