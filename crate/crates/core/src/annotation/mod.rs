//! Annotation backend: slider records, the scan catalog, the append-only
//! annotation log and the workspace that turns slider values into retopos.

mod record;
mod scans;
mod store;
mod workspace;

pub use record::{now_timestamp, AnnotationRecord, SliderParams};
pub use scans::{ScanCatalog, ScanEntry};
pub use store::AnnotationStore;
pub use workspace::{annotated_retopo, AnnotationWorkspace};
