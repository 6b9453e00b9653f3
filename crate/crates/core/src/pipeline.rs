//! Batch retopology of annotated scans.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{annotated_retopo, AnnotationStore, ScanCatalog};
use crate::blend::load_templates;
use crate::error::{Error, Result};
use crate::mesh::{mirror_mesh, save_obj, Mesh};
use crate::metric::{hoodedness_profile, DEFAULT_PROFILE_SAMPLES};
use crate::tables::write_profiles;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub templates: PathBuf,
    pub scans: PathBuf,
    pub annotations: PathBuf,
    pub out_dir: PathBuf,
    pub k: usize,
    pub mirror_augment: bool,
}

impl PipelineConfig {
    pub fn new(
        templates: impl Into<PathBuf>,
        scans: impl Into<PathBuf>,
        annotations: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            templates: templates.into(),
            scans: scans.into(),
            annotations: annotations.into(),
            out_dir: out_dir.into(),
            k: DEFAULT_PROFILE_SAMPLES,
            mirror_augment: false,
        }
    }
}

/// One mesh written by the pipeline. Paths are relative to the output
/// directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub mesh_id: String,
    pub scan_id: String,
    pub mirrored: bool,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineManifest {
    pub k: usize,
    pub mirror_augment: bool,
    pub profiles: PathBuf,
    pub outputs: Vec<PipelineOutput>,
}

pub const PIPELINE_MANIFEST: &str = "manifest.json";
pub const PIPELINE_PROFILES: &str = "profiles.csv";

/// Produces the annotated retopo of every scan (plus mirrored copies when
/// requested), their hoodedness profiles and a manifest, all under
/// `out_dir`. Scans are processed in parallel; outputs follow manifest
/// order with mirrored copies after all originals.
pub fn run_batch_pipeline(config: &PipelineConfig) -> Result<PipelineManifest> {
    if config.k < 2 {
        return Err(Error::Domain(format!(
            "profile resolution must be >= 2, got {}",
            config.k
        )));
    }
    let (templates, topo) = load_templates(&config.templates)?;
    let catalog = ScanCatalog::load(&config.scans)?;
    let annotations = AnnotationStore::read_latest(&config.annotations)?;

    let sliders = catalog
        .entries()
        .iter()
        .map(|e| {
            annotations
                .get(&e.scan_id)
                .map(|r| r.sliders)
                .ok_or_else(|| Error::NoAnnotation(e.scan_id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let retopos = catalog
        .entries()
        .par_iter()
        .zip(&sliders)
        .map(|(e, s)| Ok(annotated_retopo(&templates, &topo, s)?.renamed(e.scan_id.as_str())))
        .collect::<Result<Vec<Mesh>>>()?;

    let mut outputs: Vec<(PipelineOutput, Mesh)> = catalog
        .entries()
        .iter()
        .zip(retopos.iter().cloned())
        .map(|(e, m)| (output_entry(&e.scan_id, &e.scan_id, false), m))
        .collect();
    if config.mirror_augment {
        let mirrored = catalog
            .entries()
            .par_iter()
            .zip(&retopos)
            .map(|(e, m)| {
                let id = format!("{}_mirrored", e.scan_id);
                Ok((
                    output_entry(&id, &e.scan_id, true),
                    mirror_mesh(m, &topo)?.renamed(id.as_str()),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        outputs.extend(mirrored);
    }

    let mesh_dir = config.out_dir.join("meshes");
    fs::create_dir_all(&mesh_dir).map_err(|e| Error::io(&mesh_dir, e))?;
    let profiles = outputs
        .par_iter()
        .map(|(out, mesh)| {
            save_obj(mesh, config.out_dir.join(&out.path))?;
            hoodedness_profile(mesh, &topo, config.k)
        })
        .collect::<Result<Vec<_>>>()?;
    write_profiles(config.out_dir.join(PIPELINE_PROFILES), &profiles)?;

    let manifest = PipelineManifest {
        k: config.k,
        mirror_augment: config.mirror_augment,
        profiles: PIPELINE_PROFILES.into(),
        outputs: outputs.into_iter().map(|(o, _)| o).collect(),
    };
    let path = config.out_dir.join(PIPELINE_MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn output_entry(mesh_id: &str, scan_id: &str, mirrored: bool) -> PipelineOutput {
    PipelineOutput {
        mesh_id: mesh_id.to_string(),
        scan_id: scan_id.to_string(),
        mirrored,
        path: Path::new("meshes").join(format!("{mesh_id}.obj")),
    }
}
