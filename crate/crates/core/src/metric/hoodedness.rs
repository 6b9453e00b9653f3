use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::Vector2;

use crate::curve::{extract_loop_curve, project_frontal, resample_by_arclength, Curve2};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, TopologyDescriptor};

/// Profile resolution used when none is given.
pub const DEFAULT_PROFILE_SAMPLES: usize = 32;

/// Brow-to-margin spans at or below this length are rejected.
pub const FRAME_EPSILON: f64 = 1e-9;

/// Hoodedness sampled at `K` evenly spaced positions from the temporal
/// (t = 0) to the nasal (t = 1) end of one eye.
#[derive(Clone, Debug, PartialEq)]
pub struct HoodednessProfile {
    pub mesh_id: String,
    pub t_samples: Vec<f64>,
    pub h_values: Vec<f64>,
}

/// `k` evenly spaced samples with exact endpoints 0 and 1.
pub fn t_grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
}

impl HoodednessProfile {
    pub fn new(mesh_id: impl Into<String>, t_samples: Vec<f64>, h_values: Vec<f64>) -> Result<Self> {
        let k = t_samples.len();
        if k < 2 || h_values.len() != k {
            return Err(Error::SampleMismatch(format!(
                "profile needs >= 2 paired samples, got {} t and {} h",
                k,
                h_values.len()
            )));
        }
        if t_samples[0] != 0.0
            || t_samples[k - 1] != 1.0
            || t_samples
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
        {
            return Err(Error::SampleMismatch(
                "t samples must increase strictly from 0 to 1".into(),
            ));
        }
        if let Some(h) = h_values.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::Domain(format!("hoodedness value {h} is not finite and >= 0")));
        }
        Ok(Self {
            mesh_id: mesh_id.into(),
            t_samples,
            h_values,
        })
    }

    pub fn len(&self) -> usize {
        self.t_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.h_values.iter().sum::<f64>() / self.h_values.len() as f64
    }

    pub(crate) fn check_same_samples(&self, other: &HoodednessProfile) -> Result<()> {
        if self.t_samples.len() != other.t_samples.len()
            || self
                .t_samples
                .iter()
                .zip(&other.t_samples)
                .any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(Error::SampleMismatch(format!(
                "profiles {:?} ({} samples) and {:?} ({} samples) are sampled differently",
                self.mesh_id,
                self.len(),
                other.mesh_id,
                other.len()
            )));
        }
        Ok(())
    }
}

/// Hoodedness from three projected curves that are already sampled at the
/// same parameters: `|x . v| / |v|^2` with `v = margin - brow` and
/// `x = crease - brow`, i.e. the length of the projection of `x` onto `v`
/// relative to `|v|`.
pub fn hoodedness_from_projected(margin: &Curve2, crease: &Curve2, brow: &Curve2) -> Result<Vec<f64>> {
    let k = margin.len();
    if crease.len() != k || brow.len() != k {
        return Err(Error::SampleMismatch(format!(
            "curves have {} / {} / {} points",
            margin.len(),
            crease.len(),
            brow.len()
        )));
    }
    let pts = |c: &Curve2| -> Vec<Vector2<f64>> { c.points().to_vec() };
    let (m, c, b) = (pts(margin), pts(crease), pts(brow));
    (0..k)
        .map(|i| {
            let v = m[i] - b[i];
            let x = c[i] - b[i];
            let span = v.norm();
            if span <= FRAME_EPSILON {
                return Err(Error::DegenerateFrame {
                    t: i as f64 / (k - 1).max(1) as f64,
                });
            }
            Ok(x.dot(&v).abs() / (span * span))
        })
        .collect()
}

/// The margin, crease and brow loops of `mesh`, each resampled by arc length
/// to `k` points and then projected along the frontal axis.
pub fn projected_loops(mesh: &Mesh, topo: &TopologyDescriptor, k: usize) -> Result<[Curve2; 3]> {
    let axis = topo.frontal_axis();
    let prepare = |lp: &[usize]| -> Result<Curve2> {
        let curve = extract_loop_curve(mesh, lp)?;
        let resampled = resample_by_arclength(&curve, k)?;
        project_frontal(&resampled, &axis)
    };
    Ok([
        prepare(&topo.margin_loop)?,
        prepare(&topo.crease_loop)?,
        prepare(&topo.brow_loop)?,
    ])
}

/// Hoodedness profile of the eye described by `topo` (use
/// [`TopologyDescriptor::for_opposite_eye`] for the other eye).
pub fn hoodedness_profile(mesh: &Mesh, topo: &TopologyDescriptor, k: usize) -> Result<HoodednessProfile> {
    let [margin, crease, brow] = projected_loops(mesh, topo, k)?;
    let h = hoodedness_from_projected(&margin, &crease, &brow)?;
    HoodednessProfile::new(mesh.name.clone(), t_grid(k), h)
}

/// Mean absolute difference between two profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeError {
    pub value: f64,
    pub mesh_id_a: String,
    pub mesh_id_b: String,
}

pub fn shape_error(a: &HoodednessProfile, b: &HoodednessProfile) -> Result<ShapeError> {
    a.check_same_samples(b)?;
    let total: f64 = a.h_values.iter().zip(&b.h_values).map(|(x, y)| (x - y).abs()).sum();
    Ok(ShapeError {
        value: total / a.len() as f64,
        mesh_id_a: a.mesh_id.clone(),
        mesh_id_b: b.mesh_id.clone(),
    })
}

/// Shape error of every profile in `a` against the profile with the same
/// mesh id in `b`, keyed by mesh id.
pub fn shape_errors_by_id(a: &[HoodednessProfile], b: &[HoodednessProfile]) -> Result<BTreeMap<String, f64>> {
    let reference: BTreeMap<&str, &HoodednessProfile> = b.iter().map(|p| (p.mesh_id.as_str(), p)).collect();
    let mut out = BTreeMap::new();
    for p in a {
        let q = reference
            .get(p.mesh_id.as_str())
            .ok_or_else(|| Error::SampleMismatch(format!("mesh id {:?} has no reference profile", p.mesh_id)))?;
        out.insert(p.mesh_id.clone(), shape_error(p, q)?.value);
    }
    Ok(out)
}
