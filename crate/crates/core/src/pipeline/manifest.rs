//! Dataset manifest: everything needed to reproduce or audit a generated
//! dataset from its master seed.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augment::AugTrace;
use crate::error::{Error, Result};
use crate::taxonomy::ClassPrototype;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARTIAL_FILE: &str = "manifest.partial.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Fractal,
    Perlin,
    Octopus,
    DeadLeaves,
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeneratorKind::Fractal => "fractal",
            GeneratorKind::Perlin => "perlin",
            GeneratorKind::Octopus => "octopus",
            GeneratorKind::DeadLeaves => "dead_leaves",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: u64,
    pub class_id: Option<u32>,
    pub seed: u64,
    pub t: usize,
    pub h: usize,
    pub w: usize,
    /// Flame-variation index (0 = plain affine).
    pub variation: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aug_trace: Option<AugTrace>,
    /// Donor clip ids the augmentation trace refers to, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aug_donors: Vec<u64>,
    /// Relative directory holding the PNG frames.
    pub path: String,
    pub occupancy_min: f64,
    pub occupancy_mean: f64,
    pub occupancy_max: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub master_seed: u64,
    pub generator: GeneratorKind,
    pub classes: Option<usize>,
    pub per_class: Option<usize>,
    /// Frozen class prototypes (labeled fractal datasets); together with the
    /// per-clip seeds these regenerate every clip.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prototypes: Vec<ClassPrototype>,
    pub clips: Vec<ClipRecord>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if let (Some(c), Some(m)) = (self.classes, self.per_class) {
            if self.clips.len() != c * m {
                return Err(Error::Config(format!(
                    "manifest has {} records, expected {}x{}",
                    self.clips.len(),
                    c,
                    m
                )));
            }
        }
        let mut seen = HashSet::new();
        for clip in &self.clips {
            if !seen.insert(clip.clip_id) {
                return Err(Error::Config(format!("duplicate clip id {}", clip.clip_id)));
            }
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        self.validate()?;
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = if dir.is_dir() { dir.join(MANIFEST_FILE) } else { dir.to_path_buf() };
        let text =
            std::fs::read_to_string(&path).map_err(|_| Error::MissingFile(path.clone()))?;
        let manifest: Self = serde_json::from_str(&text)?;
        manifest.validate()?;
        Ok(manifest)
    }
}
