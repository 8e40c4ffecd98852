//! Demonstration records, ingestion, and per-demo annotation.

pub mod camera;
pub mod cluster;
pub mod color;
pub mod embeddings;
pub mod gripper;
pub mod ingest;
pub mod language;
pub mod record;
pub mod synthetic;

use std::sync::Arc;

use thiserror::Error;

pub use camera::{BinTable, CameraBin, CameraError, BIN_AZIMUTH_WIDTH_DEG, BIN_POLAR_WIDTH_DEG, UNBINNED};
pub use color::{annotate_color, canonical_color, ColorAnnotator, ColorError, HttpColorAnnotator, OfflineColorTable};
pub use embeddings::{EmbeddingProvider, WordVectors};
pub use gripper::{extract_object_position, GRIPPER_CLOSE_THRESHOLD, GRIPPER_WINDOW};
pub use ingest::{ingest, ingest_reader, write_records, IngestError};
pub use language::{extract_target_object, ExtractError, VerbLexicon, DEFAULT_CLUSTER_CUT};
pub use record::{Annotations, CameraExtrinsics, DemoRecord, Step};

/// Something that could not be annotated for one record. The corresponding
/// annotation field is left empty.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotationIssue {
    #[error("target object: {0}")]
    Object(#[from] ExtractError),
    #[error("object color: {0}")]
    Color(#[from] ColorError),
    #[error("camera bin: {0}")]
    Camera(#[from] CameraError),
}

/// Annotation configuration. Fields carried by the input record that this
/// pipeline does not compute (receptacle position, table color, primitives)
/// are kept as they are.
#[derive(Clone)]
pub struct Annotator {
    pub lexicon: VerbLexicon,
    pub embeddings: Arc<dyn EmbeddingProvider>,
    pub cluster_cut: f64,
    pub bins: BinTable,
    /// Table center in the robot base frame; camera bins are measured about it.
    pub table_center: [f64; 3],
    pub colors: Option<Arc<dyn ColorAnnotator>>,
}

impl Default for Annotator {
    fn default() -> Self {
        Annotator {
            lexicon: VerbLexicon::default(),
            embeddings: Arc::new(WordVectors::builtin()),
            cluster_cut: DEFAULT_CLUSTER_CUT,
            bins: BinTable::default(),
            table_center: [0.0; 3],
            colors: None,
        }
    }
}

impl Annotator {
    pub fn annotate(&self, record: &DemoRecord) -> (Annotations, Vec<AnnotationIssue>) {
        let mut issues = Vec::new();
        let mut ann = record.annotations.clone().unwrap_or_default();

        ann.target_object = match extract_target_object(
            &record.instructions,
            &self.lexicon,
            self.embeddings.as_ref(),
            self.cluster_cut,
        ) {
            Ok(obj) => Some(obj),
            Err(e) => {
                issues.push(e.into());
                None
            }
        };
        ann.object_position = extract_object_position(&record.steps);
        ann.camera_bin = match self.bins.bin_camera_pose(record.camera_extrinsics.pos, self.table_center) {
            Ok(bin) => Some(bin),
            Err(e) => {
                issues.push(e.into());
                None
            }
        };
        if let Some(colors) = &self.colors {
            let mut probe = record.clone();
            probe.annotations = Some(ann.clone());
            ann.object_color = match annotate_color(&probe, colors.as_ref()) {
                Ok(c) => Some(c),
                Err(e) => {
                    issues.push(e.into());
                    None
                }
            };
        }
        (ann, issues)
    }

    /// Annotate in place, returning the issues found per record index.
    pub fn annotate_all(&self, records: &mut [DemoRecord]) -> Vec<(usize, AnnotationIssue)> {
        let mut all = Vec::new();
        for (i, r) in records.iter_mut().enumerate() {
            let (ann, issues) = self.annotate(r);
            r.annotations = Some(ann);
            all.extend(issues.into_iter().map(|e| (i, e)));
        }
        all
    }
}
