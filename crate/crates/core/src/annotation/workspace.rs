use std::fs;
use std::path::{Path, PathBuf};

use super::{AnnotationRecord, AnnotationStore, ScanCatalog, SliderParams};
use crate::blend::{load_templates, regional_interpolate, sharpen_crease, TemplateSet};
use crate::error::{Error, Result};
use crate::mesh::{load_obj, save_obj, Mesh, TopologyDescriptor};

/// Regional interpolation of the templates followed by crease sharpening:
/// the retopo a set of slider values stands for.
pub fn annotated_retopo(templates: &TemplateSet, topo: &TopologyDescriptor, sliders: &SliderParams) -> Result<Mesh> {
    sliders.validate()?;
    let blended = regional_interpolate(templates, topo, sliders.u_global, sliders.u_inner, sliders.u_outer)?;
    sharpen_crease(&blended, topo, sliders.sharpen())
}

/// Everything the annotation service needs: templates, descriptor, scans
/// and the annotation log. Previews are recomputed on every call.
#[derive(Debug)]
pub struct AnnotationWorkspace {
    templates: TemplateSet,
    topo: TopologyDescriptor,
    scans: ScanCatalog,
    store: AnnotationStore,
    export_dir: PathBuf,
}

impl AnnotationWorkspace {
    pub fn new(
        templates: TemplateSet,
        topo: TopologyDescriptor,
        scans: ScanCatalog,
        store: AnnotationStore,
        export_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            templates,
            topo,
            scans,
            store,
            export_dir: export_dir.into(),
        }
    }

    pub fn open(
        template_manifest: impl AsRef<Path>,
        scan_manifest: impl AsRef<Path>,
        annotation_log: impl AsRef<Path>,
        export_dir: impl Into<PathBuf>,
    ) -> Result<Self> {
        let (templates, topo) = load_templates(template_manifest)?;
        let scans = ScanCatalog::load(scan_manifest)?;
        let store = AnnotationStore::open(annotation_log)?;
        Ok(Self::new(templates, topo, scans, store, export_dir))
    }

    pub fn scans(&self) -> &ScanCatalog {
        &self.scans
    }

    pub fn topology(&self) -> &TopologyDescriptor {
        &self.topo
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    pub fn store(&self) -> &AnnotationStore {
        &self.store
    }

    pub fn scan_mesh(&self, scan_id: &str) -> Result<Mesh> {
        load_obj(&self.scans.get(scan_id)?.scan_mesh_path)
    }

    pub fn preview(&self, scan_id: &str, sliders: &SliderParams) -> Result<Mesh> {
        self.scans.get(scan_id)?;
        Ok(annotated_retopo(&self.templates, &self.topo, sliders)?.renamed(scan_id))
    }

    pub fn save_annotation(&self, record: AnnotationRecord) -> Result<AnnotationRecord> {
        self.scans.get(&record.scan_id)?;
        self.store.append(record)
    }

    pub fn annotation(&self, scan_id: &str) -> Result<Option<AnnotationRecord>> {
        self.scans.get(scan_id)?;
        Ok(self.store.latest(scan_id))
    }

    /// Writes the retopo for the scan's latest annotation to
    /// `<export_dir>/<scan_id>.obj` and returns that path.
    pub fn export_final_retopo(&self, scan_id: &str) -> Result<PathBuf> {
        let record = self
            .annotation(scan_id)?
            .ok_or_else(|| Error::NoAnnotation(scan_id.to_string()))?;
        let mesh = self.preview(scan_id, &record.sliders)?;
        fs::create_dir_all(&self.export_dir).map_err(|e| Error::io(&self.export_dir, e))?;
        let path = self.export_dir.join(format!("{scan_id}.obj"));
        save_obj(&mesh, &path)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::ScanEntry;
    use crate::mesh::validate_topology;
    use crate::synth::{generate_template_set, TemplateGrid};

    fn workspace(dir: &Path) -> AnnotationWorkspace {
        let (templates, topo) = generate_template_set(&TemplateGrid::new(10).unwrap());
        let scans = ScanCatalog::new(
            ["s1", "s2", "s3"]
                .iter()
                .map(|id| ScanEntry {
                    scan_id: id.to_string(),
                    scan_mesh_path: dir.join(format!("{id}.obj")),
                    display_name: id.to_string(),
                })
                .collect(),
        )
        .unwrap();
        let store = AnnotationStore::open(dir.join("log.ndjson")).unwrap();
        AnnotationWorkspace::new(templates, topo, scans, store, dir.join("exports"))
    }

    #[test]
    fn zero_sliders_give_non_hooded_template() {
        let dir = tempfile::tempdir().unwrap();
        let ws = workspace(dir.path());
        let m = ws.preview("s1", &SliderParams::new(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(m.vertices, ws.templates().non_hooded.vertices);
    }

    #[test]
    fn preview_errors() {
        let dir = tempfile::tempdir().unwrap();
        let ws = workspace(dir.path());
        assert!(matches!(
            ws.preview("nope", &SliderParams::default()),
            Err(Error::UnknownScan(_))
        ));
        let bad = SliderParams::new(1.5, 0.5, 0.5, 0.0, 0.0);
        assert!(matches!(ws.preview("s1", &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn save_requires_known_scan() {
        let dir = tempfile::tempdir().unwrap();
        let ws = workspace(dir.path());
        let r = AnnotationRecord::new("ghost", SliderParams::default(), "a");
        assert!(matches!(ws.save_annotation(r), Err(Error::UnknownScan(_))));
    }

    #[test]
    fn export_is_deterministic_and_valid() {
        let dir = tempfile::tempdir().unwrap();
        let ws = workspace(dir.path());
        assert!(matches!(ws.export_final_retopo("s2"), Err(Error::NoAnnotation(_))));
        ws.save_annotation(AnnotationRecord::new(
            "s2",
            SliderParams::new(0.3, 0.7, 0.2, 0.4, 10.0),
            "a",
        ))
        .unwrap();
        let path = ws.export_final_retopo("s2").unwrap();
        let first = fs::read(&path).unwrap();
        ws.export_final_retopo("s2").unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
        let reloaded = load_obj(&path).unwrap();
        assert!(validate_topology(&reloaded, ws.topology()).is_empty());
    }
}
