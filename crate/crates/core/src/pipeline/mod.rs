//! Batch orchestration: dataset generation, storage formats, manifests, and
//! QA statistics.

pub mod generate;
pub mod manifest;
pub mod qa;
pub mod storage;

pub use generate::{augment_dataset, generate_dataset, GenerateConfig};
pub use manifest::{ClipRecord, DatasetManifest, GeneratorKind};
pub use qa::{clip_stats, qa_scan, QaReport};
pub use storage::{clip_checksum, preview_strip, read_fvid, read_png_frames, write_fvid, write_png_frames};
