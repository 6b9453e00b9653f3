use super::{Mesh, TopologyDescriptor};
use crate::error::{Error, Result};

/// Reflects a mesh across the plane through the origin with normal
/// `mirror_plane_normal`, relabeling vertices through the symmetry map.
///
/// Vertex `v` of the output receives the reflected position of
/// `symmetry_map(v)`. The face list is kept as is: for a mirror-symmetric
/// topology the relabeling already restores outward orientation, and the
/// output stays in the shared topology.
pub fn mirror_mesh(mesh: &Mesh, topo: &TopologyDescriptor) -> Result<Mesh> {
    topo.check_involution()?;
    if mesh.vertex_count() != topo.symmetry_map.len() {
        return Err(Error::CountMismatch {
            expected: topo.symmetry_map.len(),
            actual: mesh.vertex_count(),
        });
    }
    let n = topo.mirror_plane_normal();
    let vertices = topo
        .symmetry_map
        .iter()
        .map(|&src| {
            let p = mesh.vertices[src];
            p - n * (2.0 * p.dot(&n))
        })
        .collect();
    Ok(mesh.with_vertices(vertices))
}
