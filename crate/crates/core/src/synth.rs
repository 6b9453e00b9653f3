//! Procedural stand-ins for sculpted eyelid templates.
//!
//! Each template is a pair of eyelid patches (one per eye, mirror images
//! across x = 0) built on a regular grid. Grid row 0 is the brow loop, the
//! middle row is the crease loop and the last row is the margin loop. Brow
//! and margin are shared by all three templates; only the crease height
//! (as a fraction of the brow-to-margin span) and the fold bulge differ.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotation::{annotated_retopo, AnnotationRecord, AnnotationStore, ScanCatalog, ScanEntry, SliderParams};
use crate::blend::{load_templates, TemplateManifest, TemplateSet};
use crate::error::{Error, Result};
use crate::mesh::{save_obj, Mesh, TopologyDescriptor};

pub const MIN_RESOLUTION: usize = 8;

/// Horizontal center of the described (left, +x) eye patch.
const EYE_CENTER_X: f64 = 3.2;
const EYE_WIDTH: f64 = 3.0;

/// Grid dimensions of one eye patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemplateGrid {
    pub columns: usize,
    pub rows: usize,
}

impl TemplateGrid {
    /// `resolution` columns along the lid and `resolution / 2 + 1` rows from
    /// brow to margin.
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Domain(format!(
                "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(Self {
            columns: resolution,
            rows: resolution / 2 + 1,
        })
    }

    pub fn crease_row(&self) -> usize {
        self.rows / 2
    }

    pub fn vertices_per_eye(&self) -> usize {
        self.rows * self.columns
    }

    fn index(&self, row: usize, col: usize) -> usize {
        row * self.columns + col
    }

    fn row_loop(&self, row: usize) -> Vec<usize> {
        (0..self.columns).map(|c| self.index(row, c)).collect()
    }
}

#[derive(Clone, Copy, Debug)]
enum Archetype {
    NonHooded,
    PartiallyHooded,
    HoodedEpicanthal,
}

impl Archetype {
    /// Crease position as a fraction of brow-to-margin, `s` = 0 temporal.
    fn crease_fraction(self, s: f64) -> f64 {
        match self {
            Archetype::NonHooded => 0.42 + 0.06 * (PI * s).sin(),
            Archetype::PartiallyHooded => 0.70 + 0.12 * (1.0 - s),
            // nasal end folds past the margin
            Archetype::HoodedEpicanthal => 0.88 + 0.25 * s * s,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Archetype::NonHooded => "non_hooded",
            Archetype::PartiallyHooded => "partially_hooded",
            Archetype::HoodedEpicanthal => "hooded_epicanthal",
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn surface_depth(x: f64, y: f64) -> f64 {
    1.0 - 0.08 * (x - EYE_CENTER_X).powi(2) - 0.05 * (y - 0.8).powi(2)
}

fn brow_point(s: f64, x: f64) -> Vector3<f64> {
    let y = 1.5 + 0.2 * (PI * s).sin() - 0.1 * s;
    Vector3::new(x, y, surface_depth(x, y))
}

fn margin_point(s: f64, x: f64) -> Vector3<f64> {
    let y = 0.35 * (PI * s).sin();
    Vector3::new(x, y, surface_depth(x, y) + 0.05)
}

fn eye_patch(grid: &TemplateGrid, kind: Archetype) -> Vec<Vector3<f64>> {
    let mut out = vec![Vector3::zeros(); grid.vertices_per_eye()];
    let rc = grid.crease_row();
    let last = grid.rows - 1;
    for col in 0..grid.columns {
        let s = col as f64 / (grid.columns - 1) as f64;
        // temporal end (s = 0) is furthest from the nose
        let x = EYE_CENTER_X + EYE_WIDTH / 2.0 - s * EYE_WIDTH;
        let brow = brow_point(s, x);
        let margin = margin_point(s, x);
        let f = kind.crease_fraction(s);
        let mut crease = brow + (margin - brow) * f;
        crease.z = surface_depth(crease.x, crease.y) + 0.2 * (f - 0.5).max(0.0);
        for row in 0..grid.rows {
            let p = if row <= rc {
                let a = row as f64 / rc as f64;
                brow * (1.0 - a) + crease * a
            } else {
                let a = (row - rc) as f64 / (last - rc) as f64;
                crease * (1.0 - a) + margin * a
            };
            out[grid.index(row, col)] = p;
        }
    }
    out
}

fn faces(grid: &TemplateGrid) -> Vec<[usize; 3]> {
    let offset = grid.vertices_per_eye();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for row in 0..grid.rows - 1 {
        for col in 0..grid.columns - 1 {
            let a = grid.index(row, col);
            let b = grid.index(row, col + 1);
            let c = grid.index(row + 1, col);
            let d = grid.index(row + 1, col + 1);
            left.push([a, b, c]);
            left.push([b, d, c]);
            // mirrored patch: reversed winding keeps normals facing +z
            right.push([a + offset, c + offset, b + offset]);
            right.push([b + offset, c + offset, d + offset]);
        }
    }
    left.extend(right);
    left
}

fn build_mesh(grid: &TemplateGrid, kind: Archetype) -> Mesh {
    let left = eye_patch(grid, kind);
    let right = left.iter().map(|p| Vector3::new(-p.x, p.y, p.z));
    let vertices = left.iter().copied().chain(right).collect();
    Mesh::new(kind.name(), vertices, faces(grid)).expect("grid faces are in range")
}

/// Descriptor for the generated grid: loops on the left (+x) eye, inner and
/// outer masks on both eyes, symmetry map pairing the two patches.
pub fn template_topology(grid: &TemplateGrid) -> TopologyDescriptor {
    let per_eye = grid.vertices_per_eye();
    let n = 2 * per_eye;
    let mut inner = vec![0.0; n];
    let mut outer = vec![0.0; n];
    for row in 0..grid.rows {
        for col in 0..grid.columns {
            let s = col as f64 / (grid.columns - 1) as f64;
            let v = grid.index(row, col);
            let wi = smoothstep((s - 0.55) / 0.45);
            let wo = smoothstep((0.45 - s) / 0.45);
            for idx in [v, v + per_eye] {
                inner[idx] = wi;
                outer[idx] = wo;
            }
        }
    }
    TopologyDescriptor {
        vertex_count: n,
        margin_loop: grid.row_loop(grid.rows - 1),
        crease_loop: grid.row_loop(grid.crease_row()),
        brow_loop: grid.row_loop(0),
        inner_mask: inner,
        outer_mask: outer,
        symmetry_map: (0..n).map(|v| (v + per_eye) % n).collect(),
        frontal_axis: [0.0, 0.0, 1.0],
        mirror_plane_normal: [1.0, 0.0, 0.0],
    }
}

/// Builds the three templates and their descriptor in memory.
pub fn generate_template_set(grid: &TemplateGrid) -> (TemplateSet, TopologyDescriptor) {
    let topo = template_topology(grid);
    let set = TemplateSet::new(
        build_mesh(grid, Archetype::NonHooded),
        build_mesh(grid, Archetype::PartiallyHooded),
        build_mesh(grid, Archetype::HoodedEpicanthal),
        &topo,
    )
    .expect("generated templates share the generated topology");
    (set, topo)
}

/// Files written by [`gen_templates`].
#[derive(Clone, Debug)]
pub struct GeneratedTemplates {
    pub manifest: PathBuf,
    pub topology: PathBuf,
    pub meshes: [PathBuf; 3],
}

/// Writes the three template OBJs, `topology.json` and a `templates.json`
/// manifest (with relative paths) into `output_dir`. Deterministic.
pub fn gen_templates(output_dir: impl AsRef<Path>, resolution: usize) -> Result<GeneratedTemplates> {
    let dir = output_dir.as_ref();
    let grid = TemplateGrid::new(resolution)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (set, topo) = generate_template_set(&grid);

    let topology = dir.join("topology.json");
    topo.save(&topology)?;
    let mut meshes = Vec::with_capacity(3);
    for mesh in [&set.non_hooded, &set.partially_hooded, &set.hooded_epicanthal] {
        let path = dir.join(format!("{}.obj", mesh.name));
        save_obj(mesh, &path)?;
        meshes.push(path);
    }
    let manifest_doc = TemplateManifest {
        non_hooded: "non_hooded.obj".into(),
        partially_hooded: "partially_hooded.obj".into(),
        hooded_epicanthal: "hooded_epicanthal.obj".into(),
        topology: "topology.json".into(),
    };
    let manifest = dir.join("templates.json");
    let text = serde_json::to_string_pretty(&manifest_doc).expect("manifest serializes") + "\n";
    fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    Ok(GeneratedTemplates {
        manifest,
        topology,
        meshes: meshes.try_into().expect("three templates"),
    })
}

/// A stand-in for a registered scan: the annotated retopo for `sliders`
/// with seeded uniform jitter in `[-noise, noise]` on every coordinate.
pub fn synthetic_scan(
    templates: &TemplateSet,
    topo: &TopologyDescriptor,
    sliders: &SliderParams,
    noise: f64,
    seed: u64,
) -> Result<Mesh> {
    let clean = annotated_retopo(templates, topo, sliders)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = clean
        .vertices
        .iter()
        .map(|p| {
            p + Vector3::new(
                rng.random_range(-noise..=noise),
                rng.random_range(-noise..=noise),
                rng.random_range(-noise..=noise),
            )
        })
        .collect();
    Ok(clean.with_vertices(vertices))
}

/// Files written by [`gen_annotated_scans`].
#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub scan_manifest: PathBuf,
    pub annotation_log: PathBuf,
    pub sliders: Vec<SliderParams>,
}

/// Writes `n` jittered scans `scan_000.obj`, ... with seeded random slider
/// values, a `scans.json` manifest and an `annotations.ndjson` log holding
/// the true sliders of every scan. Manifest paths are relative.
pub fn gen_annotated_scans(
    output_dir: impl AsRef<Path>,
    template_manifest: impl AsRef<Path>,
    n: usize,
    seed: u64,
) -> Result<SyntheticDataset> {
    let dir = output_dir.as_ref();
    let (templates, topo) = load_templates(template_manifest)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(n);
    let mut sliders = Vec::with_capacity(n);
    for i in 0..n {
        let s = SliderParams::new(
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(-30.0..=30.0),
        );
        let scan_id = format!("scan_{i:03}");
        let mesh = synthetic_scan(&templates, &topo, &s, 0.01, rng.random())?.renamed(scan_id.as_str());
        let file = PathBuf::from(format!("{scan_id}.obj"));
        save_obj(&mesh, dir.join(&file))?;
        entries.push(ScanEntry {
            display_name: format!("Synthetic scan {i}"),
            scan_mesh_path: file,
            scan_id,
        });
        sliders.push(s);
    }
    let catalog = ScanCatalog::new(entries)?;
    let scan_manifest = dir.join("scans.json");
    catalog.save(&scan_manifest)?;

    let annotation_log = dir.join("annotations.ndjson");
    if annotation_log.exists() {
        fs::remove_file(&annotation_log).map_err(|e| Error::io(&annotation_log, e))?;
    }
    let store = AnnotationStore::open(&annotation_log)?;
    for (entry, s) in catalog.entries().iter().zip(&sliders) {
        let mut record = AnnotationRecord::new(entry.scan_id.clone(), *s, "synthetic");
        record.timestamp = "2000-01-01T00:00:00.000Z".into();
        store.append(record)?;
    }
    Ok(SyntheticDataset {
        scan_manifest,
        annotation_log,
        sliders,
    })
}
