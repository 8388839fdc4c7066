//! Dataset QA: recompute occupancy statistics and flag clips that are too
//! sparse or too dense.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::DatasetManifest;
use super::storage::{read_fvid, read_png_frames};
use crate::clip::Clip;

/// Frame occupancy limits; outside this band a frame is flagged.
pub const OCCUPANCY_MIN: f64 = 0.005;
pub const OCCUPANCY_MAX: f64 = 0.70;
/// Flagged-frame fraction above which the whole clip is degenerate.
pub const DEGENERATE_FRAME_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClipStats {
    pub occupancy_min: f64,
    pub occupancy_mean: f64,
    pub occupancy_max: f64,
    pub flagged_fraction: f64,
    pub degenerate: bool,
}

pub fn clip_stats(clip: &Clip) -> ClipStats {
    let occ = clip.occupancies();
    let flagged =
        occ.iter().filter(|o| **o < OCCUPANCY_MIN || **o > OCCUPANCY_MAX).count();
    let flagged_fraction = flagged as f64 / occ.len().max(1) as f64;
    ClipStats {
        occupancy_min: occ.iter().cloned().fold(f64::INFINITY, f64::min),
        occupancy_mean: occ.iter().sum::<f64>() / occ.len().max(1) as f64,
        occupancy_max: occ.iter().cloned().fold(0.0, f64::max),
        flagged_fraction,
        degenerate: flagged_fraction > DEGENERATE_FRAME_FRACTION,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipQa {
    pub clip_id: u64,
    pub missing: bool,
    #[serde(flatten)]
    pub stats: ClipStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaReport {
    pub clip_count: usize,
    pub missing_count: usize,
    pub degenerate_fraction: f64,
    pub length_histogram: BTreeMap<usize, usize>,
    pub per_clip: Vec<ClipQa>,
}

/// Load a clip by its record path, preferring the raw file.
pub fn load_clip(root: &Path, rel_path: &str) -> Option<Clip> {
    let fvid = root.join(format!("{rel_path}.fvid"));
    if fvid.exists() {
        if let Ok(clip) = read_fvid(&fvid) {
            return Some(clip);
        }
    }
    read_png_frames(&root.join(rel_path)).ok()
}

/// Recompute occupancy for every clip in the manifest. Missing files become
/// report entries, not errors.
pub fn qa_scan(manifest: &DatasetManifest, root: &Path) -> QaReport {
    let mut per_clip = Vec::with_capacity(manifest.clips.len());
    let mut length_histogram = BTreeMap::new();
    let mut degenerate = 0usize;
    let mut missing_count = 0usize;
    for record in &manifest.clips {
        match load_clip(root, &record.path) {
            Some(clip) => {
                let stats = clip_stats(&clip);
                *length_histogram.entry(clip.len()).or_insert(0) += 1;
                if stats.degenerate {
                    degenerate += 1;
                }
                per_clip.push(ClipQa { clip_id: record.clip_id, missing: false, stats });
            }
            None => {
                missing_count += 1;
                per_clip.push(ClipQa {
                    clip_id: record.clip_id,
                    missing: true,
                    stats: ClipStats::default(),
                });
            }
        }
    }
    let scanned = per_clip.len() - missing_count;
    QaReport {
        clip_count: manifest.clips.len(),
        missing_count,
        degenerate_fraction: degenerate as f64 / scanned.max(1) as f64,
        length_histogram,
        per_clip,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_clip_is_degenerate() {
        let stats = clip_stats(&Clip::zeros(5, 16, 16));
        assert_eq!(stats.occupancy_max, 0.0);
        assert!(stats.degenerate);
    }

    #[test]
    fn moderate_clip_is_not_degenerate() {
        let mut clip = Clip::zeros(5, 16, 16);
        for t in 0..5 {
            for y in 0..8 {
                for x in 0..8 {
                    clip.set(t, y, x, 1.0);
                }
            }
        }
        // occupancy 0.25 everywhere, inside the band
        let stats = clip_stats(&clip);
        assert!(!stats.degenerate);
        assert!((stats.occupancy_mean - 0.25).abs() < 1e-9);
    }

    #[test]
    fn over_dense_frames_flagged() {
        let mut clip = Clip::zeros(10, 8, 8);
        for t in 0..4 {
            for i in 0..64 {
                clip.frame_mut(t)[i] = 1.0; // occupancy 1.0 > 0.7
            }
        }
        // 4 of 10 frames flagged (the rest are empty, also flagged)
        let stats = clip_stats(&clip);
        assert_eq!(stats.flagged_fraction, 1.0);
        assert!(stats.degenerate);
    }
}
