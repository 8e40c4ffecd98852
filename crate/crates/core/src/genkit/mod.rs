//! Procedural generation: fractal textures, task-instance enumeration, and
//! kinematic demo synthesis from re-anchored segments.

pub mod enumerate;
pub mod synth;
pub mod texture;

pub use enumerate::{default_labs, enumerate_instances, ConfigError, Enumeration, LabConfig, Template};
pub use synth::{decompose, jitter_anchors, synthesize, synthesize_demo, Segment, SynthError};
pub use texture::{fractal_texture, TextureError, TextureRaster};
