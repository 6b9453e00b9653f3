//! Blendshape algebra over the shared topology: deltas, the three-template
//! interpolation path, regional (inner/outer) blending, crease sharpening and
//! mirror augmentation.

mod delta;
mod sharpen;
mod templates;

use crate::error::Result;
use crate::mesh::{mirror_mesh, Mesh, TopologyDescriptor};

pub use delta::{apply_delta, compute_delta, BlendshapeDelta};
pub use sharpen::{
    crease_neighborhood, mean_adjacent_crease_distance, sharpen_crease, AdjacentVertex, CreaseNeighborhood, CreaseSide,
    SharpenParams,
};
pub use templates::{
    generate_candidates, load_templates, path_interpolate, regional_interpolate, regional_parameter, TemplateManifest,
    TemplateSet, DEFAULT_CANDIDATE_COUNT,
};

/// Input meshes followed by the mirrored copy of each, in the same order.
pub fn mirror_augment_dataset(meshes: &[Mesh], topo: &TopologyDescriptor) -> Result<Vec<Mesh>> {
    let mirrored = meshes
        .iter()
        .map(|m| mirror_mesh(m, topo))
        .collect::<Result<Vec<_>>>()?;
    Ok(meshes.iter().cloned().chain(mirrored).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn pair_topo() -> TopologyDescriptor {
        let mut topo = TopologyDescriptor::trivial(2);
        topo.symmetry_map = vec![1, 0];
        topo
    }

    fn mesh(a: [f64; 3], b: [f64; 3]) -> Mesh {
        Mesh::new("m", vec![Vector3::from(a), Vector3::from(b)], vec![]).unwrap()
    }

    #[test]
    fn augmentation_doubles() {
        let topo = pair_topo();
        let data = vec![
            mesh([1.0, 0.0, 0.0], [-2.0, 0.0, 0.0]),
            mesh([0.5, 1.0, 0.0], [0.0, 0.0, 3.0]),
        ];
        let out = mirror_augment_dataset(&data, &topo).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(&out[..2], &data[..]);
    }

    #[test]
    fn symmetric_mesh_mirrors_to_itself() {
        let topo = pair_topo();
        let sym = mesh([0.4, 1.0, 2.0], [-0.4, 1.0, 2.0]);
        let out = mirror_augment_dataset(std::slice::from_ref(&sym), &topo).unwrap();
        assert!(out[1].max_coord_diff(&sym) <= 1e-9);
    }

    #[test]
    fn augmenting_twice_repeats_originals() {
        let topo = pair_topo();
        let data = vec![
            mesh([1.0, 0.0, 0.0], [-2.0, 0.0, 0.0]),
            mesh([0.5, 1.0, 0.0], [0.0, 0.0, 3.0]),
            mesh([0.1, 0.2, 0.3], [0.4, 0.5, 0.6]),
        ];
        let n = data.len();
        let twice = mirror_augment_dataset(&mirror_augment_dataset(&data, &topo).unwrap(), &topo).unwrap();
        assert_eq!(twice.len(), 4 * n);
        for i in 0..n {
            assert_eq!(twice[2 * n + i], twice[n + i]);
            assert!(twice[3 * n + i].max_coord_diff(&data[i]) <= 1e-12);
        }
    }
}
