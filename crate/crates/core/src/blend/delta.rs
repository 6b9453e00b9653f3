use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Per-vertex displacement between two meshes in the same topology.
#[derive(Clone, Debug, PartialEq)]
pub struct BlendshapeDelta {
    pub offsets: Vec<Vector3<f64>>,
}

pub fn compute_delta(base: &Mesh, target: &Mesh) -> Result<BlendshapeDelta> {
    check_count(base.vertex_count(), target.vertex_count())?;
    let offsets = target.vertices.iter().zip(&base.vertices).map(|(t, b)| t - b).collect();
    Ok(BlendshapeDelta { offsets })
}

/// `mesh + weight * delta`, faces unchanged.
pub fn apply_delta(mesh: &Mesh, delta: &BlendshapeDelta, weight: f64) -> Result<Mesh> {
    check_count(mesh.vertex_count(), delta.offsets.len())?;
    let vertices = mesh
        .vertices
        .iter()
        .zip(&delta.offsets)
        .map(|(p, d)| p + d * weight)
        .collect();
    Ok(mesh.with_vertices(vertices))
}

fn check_count(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::CountMismatch { expected, actual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::tests::unit_triangle;

    #[test]
    fn identical_meshes_give_zero_delta() {
        let m = unit_triangle();
        let d = compute_delta(&m, &m).unwrap();
        assert!(d.offsets.iter().all(|o| *o == Vector3::zeros()));
    }

    #[test]
    fn translation_gives_constant_offset() {
        let m = unit_triangle();
        let shifted = m.with_vertices(m.vertices.iter().map(|p| p + Vector3::x()).collect());
        let d = compute_delta(&m, &shifted).unwrap();
        assert!(d.offsets.iter().all(|o| *o == Vector3::x()));
    }

    #[test]
    fn mismatched_counts_are_rejected() {
        let m = unit_triangle();
        let small = Mesh::new("s", vec![Vector3::zeros(); 2], vec![]).unwrap();
        assert!(matches!(compute_delta(&m, &small), Err(Error::CountMismatch { .. })));
        let d = BlendshapeDelta {
            offsets: vec![Vector3::zeros(); 2],
        };
        assert!(matches!(apply_delta(&m, &d, 1.0), Err(Error::CountMismatch { .. })));
    }

    #[test]
    fn weights_zero_half_one() {
        let m = unit_triangle();
        let t = m.with_vertices(vec![
            Vector3::new(2.0, 1.0, 0.5),
            Vector3::new(-1.0, 3.0, 0.0),
            Vector3::new(0.25, 0.75, -4.0),
        ]);
        let d = compute_delta(&m, &t).unwrap();
        assert_eq!(apply_delta(&m, &d, 0.0).unwrap(), m);
        assert!(apply_delta(&m, &d, 1.0).unwrap().max_coord_diff(&t) <= 1e-12);
        let half = apply_delta(&m, &d, 0.5).unwrap();
        for ((h, a), b) in half.vertices.iter().zip(&m.vertices).zip(&t.vertices) {
            assert!((h - (a + b) / 2.0).amax() <= 1e-12);
        }
        assert_eq!(half.faces, m.faces);
    }
}
