//! Dataset-composition toolkit for robot imitation learning.
//!
//! Task specifications describe how each dimension of variation (camera
//! pose, object and table texture, object and receptacle placement, motion
//! primitive, scene) is generated; demonstration corpora are annotated with
//! the same dimensions, profiled into per-dimension supports, compared for
//! diversity and alignment, filtered by aligned retrieval, and mixed into
//! co-training batches.

pub mod dvalgebra;
pub mod genkit;
pub mod geometry;
pub mod metadata;
pub mod pose;
pub mod retrieval;
pub mod rng;
pub mod sampler;
pub mod sexpr;
pub mod taskspec;

pub use dvalgebra::{classify_case, is_aligned, profile_dataset, support_size, CaseLabel, DatasetProfile, Dv, DvSupport};
pub use genkit::{decompose, enumerate_instances, fractal_texture, synthesize, LabConfig, Segment, TextureRaster};
pub use metadata::{ingest, Annotations, Annotator, DemoRecord, Step};
pub use pose::Pose;
pub use retrieval::{build_index, retrieval_report, retrieve, DemoIndex, RetrievalQuery};
pub use sampler::{stream_stats, SampleStream};
pub use taskspec::{parse, sample_instance, serialize, TaskInstance, TaskSpec};
