//! Named eyelid loops, region masks and the left/right symmetry map.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-6;
const MASK_TOLERANCE: f64 = 1e-12;

fn default_frontal_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn default_mirror_normal() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// Shared-topology annotations for one eye of a face mesh.
///
/// The three loops are ordered temporal to nasal (index 0 is the outer end).
/// The loops describe one eye; the other eye is reached through
/// `symmetry_map` (see [`TopologyDescriptor::for_opposite_eye`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDescriptor {
    pub vertex_count: usize,
    pub margin_loop: Vec<usize>,
    pub crease_loop: Vec<usize>,
    pub brow_loop: Vec<usize>,
    pub inner_mask: Vec<f64>,
    pub outer_mask: Vec<f64>,
    pub symmetry_map: Vec<usize>,
    #[serde(default = "default_frontal_axis")]
    pub frontal_axis: [f64; 3],
    #[serde(default = "default_mirror_normal")]
    pub mirror_plane_normal: [f64; 3],
}

impl TopologyDescriptor {
    /// Descriptor with two-vertex loops, empty masks and identity symmetry.
    /// Useful for meshes that carry no eyelid annotation.
    pub fn trivial(vertex_count: usize) -> Self {
        let pair = vec![0, 1.min(vertex_count.saturating_sub(1))];
        Self {
            vertex_count,
            margin_loop: pair.clone(),
            crease_loop: pair.clone(),
            brow_loop: pair,
            inner_mask: vec![0.0; vertex_count],
            outer_mask: vec![0.0; vertex_count],
            symmetry_map: (0..vertex_count).collect(),
            frontal_axis: default_frontal_axis(),
            mirror_plane_normal: default_mirror_normal(),
        }
    }

    pub fn frontal_axis(&self) -> Vector3<f64> {
        Vector3::from(self.frontal_axis)
    }

    pub fn mirror_plane_normal(&self) -> Vector3<f64> {
        Vector3::from(self.mirror_plane_normal)
    }

    /// Checks every descriptor invariant, failing on the first violation.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count;
        for (name, lp) in [
            ("margin_loop", &self.margin_loop),
            ("crease_loop", &self.crease_loop),
            ("brow_loop", &self.brow_loop),
        ] {
            if let Some(&bad) = lp.iter().find(|&&v| v >= n) {
                return Err(violation(format!("{name} index {bad} out of range for {n} vertices")));
            }
            let distinct: HashSet<_> = lp.iter().collect();
            if distinct.len() < 2 {
                return Err(violation(format!("{name} needs at least 2 distinct vertices")));
            }
        }
        for (name, mask) in [("inner_mask", &self.inner_mask), ("outer_mask", &self.outer_mask)] {
            if mask.len() != n {
                return Err(violation(format!("{name} has {} entries, expected {n}", mask.len())));
            }
            if let Some(v) = mask.iter().position(|w| !(0.0..=1.0).contains(w)) {
                return Err(violation(format!("{name}[{v}] = {} outside [0, 1]", mask[v])));
            }
        }
        if let Some(v) = (0..n).find(|&v| self.inner_mask[v] + self.outer_mask[v] > 1.0 + MASK_TOLERANCE) {
            return Err(violation(format!(
                "inner_mask + outer_mask = {} > 1 at vertex {v}",
                self.inner_mask[v] + self.outer_mask[v]
            )));
        }
        if self.symmetry_map.len() != n {
            return Err(violation(format!(
                "symmetry_map has {} entries, expected {n}",
                self.symmetry_map.len()
            )));
        }
        self.check_involution()?;
        for (name, axis) in [
            ("frontal_axis", self.frontal_axis()),
            ("mirror_plane_normal", self.mirror_plane_normal()),
        ] {
            if !axis.iter().all(|c| c.is_finite()) || (axis.norm() - 1.0).abs() > UNIT_TOLERANCE {
                return Err(violation(format!("{name} is not a unit vector")));
            }
        }
        Ok(())
    }

    pub(crate) fn check_involution(&self) -> Result<()> {
        let map = &self.symmetry_map;
        for (v, &w) in map.iter().enumerate() {
            if w >= map.len() {
                return Err(violation(format!("symmetry_map[{v}] = {w} out of range")));
            }
            if map[w] != v {
                return Err(violation(format!(
                    "symmetry_map is not an involution: map(map({v})) = {}",
                    map[w]
                )));
            }
        }
        Ok(())
    }

    /// The same descriptor expressed for the other eye: loops and masks are
    /// carried through the symmetry map. Loop order stays temporal to nasal.
    pub fn for_opposite_eye(&self) -> TopologyDescriptor {
        let map = |lp: &[usize]| lp.iter().map(|&v| self.symmetry_map[v]).collect();
        let permute = |mask: &[f64]| self.symmetry_map.iter().map(|&w| mask[w]).collect();
        TopologyDescriptor {
            margin_loop: map(&self.margin_loop),
            crease_loop: map(&self.crease_loop),
            brow_loop: map(&self.brow_loop),
            inner_mask: permute(&self.inner_mask),
            outer_mask: permute(&self.outer_mask),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let topo: TopologyDescriptor = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        topo.validate()?;
        Ok(topo)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn violation(msg: String) -> Error {
    Error::InvariantViolation(msg)
}

/// Reads and validates a descriptor document.
pub fn load_topology(path: impl AsRef<Path>) -> Result<TopologyDescriptor> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TopologyDescriptor::from_json(&text)
}
