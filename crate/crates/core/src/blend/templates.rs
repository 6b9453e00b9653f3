use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{load_obj, load_topology, validate_topology, Mesh, TopologyDescriptor};

/// Number of candidate retopos offered per scan.
pub const DEFAULT_CANDIDATE_COUNT: usize = 20;

/// The three archetype eyelid shapes spanning the interpolation family.
#[derive(Clone, Debug, PartialEq)]
pub struct TemplateSet {
    pub non_hooded: Mesh,
    pub partially_hooded: Mesh,
    pub hooded_epicanthal: Mesh,
}

impl TemplateSet {
    /// Checks that all three templates fit `topo` and share one face list.
    pub fn new(
        non_hooded: Mesh,
        partially_hooded: Mesh,
        hooded_epicanthal: Mesh,
        topo: &TopologyDescriptor,
    ) -> Result<Self> {
        for m in [&non_hooded, &partially_hooded, &hooded_epicanthal] {
            if let Some(v) = validate_topology(m, topo).first() {
                return Err(Error::InvariantViolation(format!("template {:?}: {v}", m.name)));
            }
        }
        if non_hooded.faces != partially_hooded.faces || non_hooded.faces != hooded_epicanthal.faces {
            return Err(Error::InvariantViolation("templates do not share one face list".into()));
        }
        Ok(Self {
            non_hooded,
            partially_hooded,
            hooded_epicanthal,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.non_hooded.vertex_count()
    }

    /// Position of vertex `v` at path parameter `u` (assumed in [0, 1]).
    fn point_at(&self, v: usize, u: f64) -> Vector3<f64> {
        let (a, b, s) = if u <= 0.5 {
            (&self.non_hooded, &self.partially_hooded, 2.0 * u)
        } else {
            (&self.partially_hooded, &self.hooded_epicanthal, 2.0 * u - 1.0)
        };
        // (1 - s) a + s b hits both knots exactly
        a.vertices[v] * (1.0 - s) + b.vertices[v] * s
    }
}

fn check_unit(name: &str, u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {u} outside [0, 1]")))
    }
}

/// Piecewise-linear path non-hooded (u = 0) -> partially hooded (u = 0.5)
/// -> hooded with epicanthal fold (u = 1).
pub fn path_interpolate(templates: &TemplateSet, u: f64) -> Result<Mesh> {
    check_unit("u", u)?;
    let vertices = (0..templates.vertex_count())
        .map(|v| templates.point_at(v, u))
        .collect();
    Ok(templates
        .non_hooded
        .with_vertices(vertices)
        .renamed(format!("path_u{u}")))
}

/// Per-vertex path parameter from the global, inner and outer sliders.
///
/// Equals `(1 - wi - wo) * global + wi * inner + wo * outer`, written so that
/// equal sliders give exactly the common value.
pub fn regional_parameter(wi: f64, wo: f64, global: f64, inner: f64, outer: f64) -> f64 {
    (global + wi * (inner - global) + wo * (outer - global)).clamp(0.0, 1.0)
}

/// Evaluates the template path at a per-vertex parameter blended from the
/// inner and outer region masks.
pub fn regional_interpolate(
    templates: &TemplateSet,
    topo: &TopologyDescriptor,
    u_global: f64,
    u_inner: f64,
    u_outer: f64,
) -> Result<Mesh> {
    check_unit("u_global", u_global)?;
    check_unit("u_inner", u_inner)?;
    check_unit("u_outer", u_outer)?;
    let n = templates.vertex_count();
    for len in [topo.vertex_count, topo.inner_mask.len(), topo.outer_mask.len()] {
        if len != n {
            return Err(Error::CountMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let vertices = (0..n)
        .map(|v| {
            let u = regional_parameter(topo.inner_mask[v], topo.outer_mask[v], u_global, u_inner, u_outer);
            templates.point_at(v, u)
        })
        .collect();
    Ok(templates.non_hooded.with_vertices(vertices).renamed("regional"))
}

/// `n` meshes at u = k / (n - 1) along the template path.
pub fn generate_candidates(templates: &TemplateSet, n: usize) -> Result<Vec<Mesh>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 candidates, got {n}")));
    }
    (0..n)
        .map(|k| {
            let u = k as f64 / (n - 1) as f64;
            path_interpolate(templates, u).map(|m| m.renamed(format!("candidate_{k:02}")))
        })
        .collect()
}

/// Template set manifest. Relative paths resolve against the manifest's
/// directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateManifest {
    pub non_hooded: PathBuf,
    pub partially_hooded: PathBuf,
    pub hooded_epicanthal: PathBuf,
    pub topology: PathBuf,
}

impl TemplateManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: TemplateManifest = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut manifest.non_hooded,
            &mut manifest.partially_hooded,
            &mut manifest.hooded_epicanthal,
            &mut manifest.topology,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(manifest)
    }
}

/// Loads the templates and descriptor named by a manifest.
pub fn load_templates(manifest_path: impl AsRef<Path>) -> Result<(TemplateSet, TopologyDescriptor)> {
    let manifest = TemplateManifest::load(manifest_path)?;
    let topo = load_topology(&manifest.topology)?;
    let set = TemplateSet::new(
        load_obj(&manifest.non_hooded)?,
        load_obj(&manifest.partially_hooded)?,
        load_obj(&manifest.hooded_epicanthal)?,
        &topo,
    )?;
    Ok((set, topo))
}
