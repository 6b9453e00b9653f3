//! Crease sharpening: pinches the edge-loops on either side of the crease
//! loop toward it.

use std::collections::{BTreeSet, HashSet};

use nalgebra::{Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TopologyDescriptor};

/// Strength in [0, 1], orientation in degrees in [-90, 90].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SharpenParams {
    pub strength: f64,
    pub orientation_deg: f64,
}

impl SharpenParams {
    pub fn new(strength: f64, orientation_deg: f64) -> Result<Self> {
        let p = Self {
            strength,
            orientation_deg,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::Domain(format!(
                "sharpen strength {} outside [0, 1]",
                self.strength
            )));
        }
        if !(-90.0..=90.0).contains(&self.orientation_deg) {
            return Err(Error::Domain(format!(
                "sharpen orientation {} outside [-90, 90]",
                self.orientation_deg
            )));
        }
        Ok(())
    }
}

/// Which side of the crease an adjacent vertex sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CreaseSide {
    Brow,
    Margin,
}

/// A vertex one ring away from a crease loop, paired with the crease vertex
/// it is pulled toward.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacentVertex {
    pub vertex: usize,
    pub crease_vertex: usize,
    /// Unit tangent of the crease polyline at `crease_vertex`.
    pub tangent: Vector3<f64>,
    pub side: CreaseSide,
    /// +1 for the described eye, -1 for its mirror image, so that a given
    /// orientation turns both eyes symmetrically.
    pub handedness: f64,
}

/// The crease loops of both eyes and their adjacent vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct CreaseNeighborhood {
    pub crease_vertices: BTreeSet<usize>,
    pub adjacent: Vec<AdjacentVertex>,
}

impl CreaseNeighborhood {
    pub fn side(&self, side: CreaseSide) -> Vec<usize> {
        self.adjacent
            .iter()
            .filter(|a| a.side == side)
            .map(|a| a.vertex)
            .collect()
    }
}

struct EyeLoops {
    crease: Vec<usize>,
    brow_to_margin: Vector3<f64>,
    handedness: f64,
}

fn centroid(mesh: &Mesh, lp: &[usize]) -> Vector3<f64> {
    lp.iter().map(|&v| mesh.vertices[v]).sum::<Vector3<f64>>() / lp.len() as f64
}

fn eyes(mesh: &Mesh, topo: &TopologyDescriptor) -> Vec<EyeLoops> {
    let primary = EyeLoops {
        crease: topo.crease_loop.clone(),
        brow_to_margin: centroid(mesh, &topo.margin_loop) - centroid(mesh, &topo.brow_loop),
        handedness: 1.0,
    };
    let other = topo.for_opposite_eye();
    let same_set = other.crease_loop.iter().collect::<HashSet<_>>() == topo.crease_loop.iter().collect::<HashSet<_>>();
    if same_set {
        return vec![primary];
    }
    let mirrored = EyeLoops {
        crease: other.crease_loop.clone(),
        brow_to_margin: centroid(mesh, &other.margin_loop) - centroid(mesh, &other.brow_loop),
        handedness: -1.0,
    };
    vec![primary, mirrored]
}

/// Central-difference tangent of the crease polyline at position `i`,
/// one-sided at the ends.
fn tangent(mesh: &Mesh, lp: &[usize], i: usize) -> Vector3<f64> {
    let prev = mesh.vertices[lp[i.saturating_sub(1)]];
    let next = mesh.vertices[lp[(i + 1).min(lp.len() - 1)]];
    let t = next - prev;
    let n = t.norm();
    if n > 0.0 {
        t / n
    } else {
        Vector3::zeros()
    }
}

/// Derives the adjacent loops of the crease from face connectivity.
///
/// The crease of the described eye and, when the symmetry map moves it, the
/// crease of the other eye are both included. Each non-crease one-ring
/// neighbor of a crease vertex is paired with its nearest crease vertex.
pub fn crease_neighborhood(mesh: &Mesh, topo: &TopologyDescriptor) -> Result<CreaseNeighborhood> {
    let n = mesh.vertex_count();
    if topo.vertex_count != n || topo.symmetry_map.len() != n {
        return Err(Error::CountMismatch {
            expected: topo.vertex_count,
            actual: n,
        });
    }
    if let Some(&bad) = topo.crease_loop.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let eyes = eyes(mesh, topo);
    let crease_vertices: BTreeSet<usize> = eyes.iter().flat_map(|e| e.crease.iter().copied()).collect();
    let rings = mesh.vertex_neighbors();

    let mut adjacent_set = BTreeSet::new();
    for &c in &crease_vertices {
        let outside: Vec<usize> = rings[c]
            .iter()
            .copied()
            .filter(|v| !crease_vertices.contains(v))
            .collect();
        if outside.is_empty() {
            return Err(Error::Topology(format!("crease vertex {c} has no non-crease neighbor")));
        }
        adjacent_set.extend(outside);
    }

    // (eye, loop position) for every crease vertex, in a fixed order
    let slots: Vec<(usize, usize)> = eyes
        .iter()
        .enumerate()
        .flat_map(|(e, eye)| (0..eye.crease.len()).map(move |i| (e, i)))
        .collect();

    let adjacent = adjacent_set
        .into_iter()
        .map(|a| {
            let p = mesh.vertices[a];
            let &(e, i) = slots
                .iter()
                .min_by(|&&(e1, i1), &&(e2, i2)| {
                    let d1 = (mesh.vertices[eyes[e1].crease[i1]] - p).norm_squared();
                    let d2 = (mesh.vertices[eyes[e2].crease[i2]] - p).norm_squared();
                    d1.total_cmp(&d2)
                })
                .expect("crease loop is non-empty");
            let eye = &eyes[e];
            let c = eye.crease[i];
            let side = if (p - mesh.vertices[c]).dot(&eye.brow_to_margin) > 0.0 {
                CreaseSide::Margin
            } else {
                CreaseSide::Brow
            };
            AdjacentVertex {
                vertex: a,
                crease_vertex: c,
                tangent: tangent(mesh, &eye.crease, i),
                side,
                handedness: eye.handedness,
            }
        })
        .collect();

    Ok(CreaseNeighborhood {
        crease_vertices,
        adjacent,
    })
}

/// Pulls every adjacent-loop vertex toward its nearest crease vertex by
/// `strength` of their separation, rotating the pull by `orientation_deg`
/// about the local crease tangent. Crease vertices and all other vertices
/// keep their positions bit for bit.
pub fn sharpen_crease(mesh: &Mesh, topo: &TopologyDescriptor, params: SharpenParams) -> Result<Mesh> {
    params.validate()?;
    let hood = crease_neighborhood(mesh, topo)?;
    let mut vertices = mesh.vertices.clone();
    let angle = params.orientation_deg.to_radians();
    for adj in &hood.adjacent {
        let p = mesh.vertices[adj.vertex];
        let mut pull = (mesh.vertices[adj.crease_vertex] - p) * params.strength;
        if angle != 0.0 && adj.tangent != Vector3::zeros() {
            let axis = Unit::new_normalize(adj.tangent);
            pull = Rotation3::from_axis_angle(&axis, adj.handedness * angle) * pull;
        }
        vertices[adj.vertex] = p + pull;
    }
    Ok(mesh.with_vertices(vertices))
}

/// Mean distance from each adjacent vertex (as paired in `hood`) to its
/// crease vertex, measured on `mesh`.
pub fn mean_adjacent_crease_distance(mesh: &Mesh, hood: &CreaseNeighborhood) -> f64 {
    let total: f64 = hood
        .adjacent
        .iter()
        .map(|a| (mesh.vertices[a.vertex] - mesh.vertices[a.crease_vertex]).norm())
        .sum();
    total / hood.adjacent.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_template_set, TemplateGrid};

    fn template() -> (Mesh, TopologyDescriptor) {
        let (set, topo) = generate_template_set(&TemplateGrid::new(12).unwrap());
        (set.partially_hooded, topo)
    }

    #[test]
    fn zero_strength_is_identity() {
        let (mesh, topo) = template();
        let out = sharpen_crease(&mesh, &topo, SharpenParams::new(0.0, 35.0).unwrap()).unwrap();
        assert_eq!(out, mesh);
    }

    #[test]
    fn half_strength_halves_distance() {
        let (mesh, topo) = template();
        let hood = crease_neighborhood(&mesh, &topo).unwrap();
        let out = sharpen_crease(&mesh, &topo, SharpenParams::new(0.5, 0.0).unwrap()).unwrap();
        for a in &hood.adjacent {
            let before = (mesh.vertices[a.vertex] - mesh.vertices[a.crease_vertex]).norm();
            let after = (out.vertices[a.vertex] - out.vertices[a.crease_vertex]).norm();
            assert!((after - 0.5 * before).abs() <= 1e-12, "{before} {after}");
        }
    }

    #[test]
    fn crease_and_far_vertices_fixed() {
        let (mesh, topo) = template();
        let hood = crease_neighborhood(&mesh, &topo).unwrap();
        let moved: BTreeSet<usize> = hood.adjacent.iter().map(|a| a.vertex).collect();
        for (s, o) in [(1.0, -90.0), (0.3, 45.0), (0.7, 0.0)] {
            let out = sharpen_crease(&mesh, &topo, SharpenParams::new(s, o).unwrap()).unwrap();
            for v in 0..mesh.vertex_count() {
                if !moved.contains(&v) {
                    assert_eq!(out.vertices[v], mesh.vertices[v]);
                }
            }
            for &c in &hood.crease_vertices {
                assert_eq!(out.vertices[c].map(f64::to_bits), mesh.vertices[c].map(f64::to_bits));
            }
        }
    }

    #[test]
    fn both_eyes_and_both_sides_are_found() {
        let (mesh, topo) = template();
        let hood = crease_neighborhood(&mesh, &topo).unwrap();
        assert_eq!(hood.crease_vertices.len(), 2 * topo.crease_loop.len());
        let brow = hood.side(CreaseSide::Brow);
        let margin = hood.side(CreaseSide::Margin);
        assert_eq!(brow.len(), margin.len());
        assert_eq!(brow.len() + margin.len(), hood.adjacent.len());
    }

    #[test]
    fn symmetric_input_stays_symmetric_with_orientation() {
        let (mesh, topo) = template();
        let out = sharpen_crease(&mesh, &topo, SharpenParams::new(0.6, 30.0).unwrap()).unwrap();
        let mirrored = crate::mesh::mirror_mesh(&out, &topo).unwrap();
        assert!(mirrored.max_coord_diff(&out) <= 1e-12);
    }

    #[test]
    fn orientation_preserves_pull_length() {
        let (mesh, topo) = template();
        let hood = crease_neighborhood(&mesh, &topo).unwrap();
        let flat = sharpen_crease(&mesh, &topo, SharpenParams::new(0.4, 0.0).unwrap()).unwrap();
        let turned = sharpen_crease(&mesh, &topo, SharpenParams::new(0.4, 60.0).unwrap()).unwrap();
        for a in &hood.adjacent {
            let d0 = (flat.vertices[a.vertex] - mesh.vertices[a.vertex]).norm();
            let d1 = (turned.vertices[a.vertex] - mesh.vertices[a.vertex]).norm();
            assert!((d0 - d1).abs() <= 1e-12);
        }
    }

    #[test]
    fn isolated_crease_vertex_is_topology_error() {
        let mesh = Mesh::new(
            "iso",
            vec![
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let mut topo = TopologyDescriptor::trivial(3);
        topo.crease_loop = vec![0, 1, 2];
        let err = sharpen_crease(&mesh, &topo, SharpenParams::new(0.5, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Topology(_)));
    }

    #[test]
    fn params_out_of_range() {
        assert!(SharpenParams::new(1.1, 0.0).is_err());
        assert!(SharpenParams::new(0.5, 91.0).is_err());
        assert!(SharpenParams::new(f64::NAN, 0.0).is_err());
    }
}
