//! Dataset generation: a work queue of independent clip jobs with
//! resume support and scheduling-independent output.

use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::manifest::{
    ClipRecord, DatasetManifest, GeneratorKind, FORMAT_VERSION, PARTIAL_FILE,
};
use super::qa::clip_stats;
use super::storage::{write_fvid, write_png_frames};
use crate::altgen::{deadleaves_clip_seeded, octopus_clip_seeded, perlin_clip, PerlinLabel};
use crate::augment::{augment_clip, AugmentConfig};
use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::motion::{sample_video_decomposed, sample_video_nonlinear};
use crate::par::map_indexed;
use crate::render::{render_clip, DEFAULT_ITERATIONS};
use crate::rng::{derive_seed, seeded_rng};
use crate::taxonomy::{mutate, prototype_from_seed, ClassPrototype};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub kind: GeneratorKind,
    /// Labeled mode: class count and instances per class.
    pub classes: Option<usize>,
    pub per_class: Option<usize>,
    /// Unlabeled mode: total clip count.
    pub total: Option<usize>,
    pub width: usize,
    pub height: usize,
    /// Frame count for the alternative generators; fractal clips draw their
    /// own length per Algorithm 1.
    pub frames: usize,
    pub iterations: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// 0 = default thread pool, 1 = sequential.
    pub workers: usize,
    pub write_png: bool,
    pub write_fvid: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            kind: GeneratorKind::Fractal,
            classes: None,
            per_class: None,
            total: None,
            width: 64,
            height: 64,
            frames: 19,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            out_dir: PathBuf::from("dataset"),
            workers: 0,
            write_png: true,
            write_fvid: true,
        }
    }
}

impl GenerateConfig {
    pub fn clip_count(&self) -> Result<usize> {
        match (self.classes, self.per_class, self.total) {
            (Some(c), Some(m), _) if c > 0 && m > 0 => Ok(c * m),
            (None, None, Some(n)) if n > 0 => Ok(n),
            _ => Err(Error::Config(
                "need either classes+per_class or a positive total".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.clip_count()?;
        if self.width == 0 || self.height == 0 || self.frames == 0 {
            return Err(Error::Config("zero clip dimensions".into()));
        }
        if self.classes.is_some() != self.per_class.is_some() {
            return Err(Error::Config("classes and per_class must be set together".into()));
        }
        if self.classes.is_some() && self.kind != GeneratorKind::Fractal {
            return Err(Error::Config(
                "labeled class datasets are only defined for the fractal generator".into(),
            ));
        }
        Ok(())
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::Config(e.to_string())),
            _ => Ok(serde_json::from_str(&text)?),
        }
    }
}

fn clip_dir_name(clip_id: u64) -> String {
    format!("clip_{clip_id:06}")
}

/// How many reseeded redraws a divergent chaos-game clip gets before the
/// error propagates.
const DIVERGENCE_RETRIES: u64 = 16;

const PROBE_MUTANTS: u64 = 3;
const PROBE_ITERATIONS: u64 = 4000;
const PROTOTYPE_REDRAWS: u64 = 64;

/// Sample class prototypes and keep only renderable ones: a prototype whose
/// first few mutants diverge in a cheap low-res probe is redrawn from
/// `derive_seed(original_seed, u64::MAX - attempt)`. Deterministic per class,
/// so the list is independent of worker count and of the other classes.
fn sample_renderable_prototypes(count: usize, master_seed: u64) -> Vec<ClassPrototype> {
    (0..count as u32)
        .map(|c| {
            let base_seed = derive_seed(master_seed, c as u64);
            let mut proto = prototype_from_seed(c, base_seed);
            for attempt in 1..=PROTOTYPE_REDRAWS {
                // probe the exact seeds the first instances will use
                let renders = (0..PROBE_MUTANTS).all(|i| {
                    let seed = derive_seed(proto.seed, i);
                    let params = mutate(&proto.params, &mut seeded_rng(seed));
                    render_clip(&params, 32, 32, PROBE_ITERATIONS, seed).is_ok()
                });
                if renders {
                    break;
                }
                proto = prototype_from_seed(c, derive_seed(base_seed, u64::MAX - attempt));
            }
            proto
        })
        .collect()
}

/// Resample-and-render with deterministic retries: a divergent render redraws
/// the whole clip from `derive_seed(clip_seed, u64::MAX - attempt)`, so the
/// outcome depends only on the original seed, never on scheduling. Retry
/// indices count down from u64::MAX - 1; the viewport stream owns u64::MAX
/// and frame streams own small indices, so the three never collide. Returns
/// the seed actually used so the manifest row stays self-reproducing.
fn render_with_retries(
    clip_seed: u64,
    config: &GenerateConfig,
    sample: impl Fn(u64) -> crate::motion::ClipParams,
) -> Result<(Clip, crate::motion::ClipParams, u64)> {
    let mut seed = clip_seed;
    for attempt in 1..=DIVERGENCE_RETRIES {
        let params = sample(seed);
        match render_clip(&params, config.width, config.height, config.iterations, seed) {
            Ok(clip) => return Ok((clip, params, seed)),
            Err(Error::DivergentRender { .. }) => {
                seed = derive_seed(clip_seed, u64::MAX - attempt);
            }
            Err(e) => return Err(e),
        }
    }
    let params = sample(seed);
    let clip = render_clip(&params, config.width, config.height, config.iterations, seed)?;
    Ok((clip, params, seed))
}

/// Render the clip for one job index. Pure given (config, prototypes, index),
/// which is what makes the dataset independent of scheduling.
fn build_clip(
    config: &GenerateConfig,
    prototypes: &[crate::taxonomy::ClassPrototype],
    index: usize,
) -> Result<(Clip, Option<u32>, u64, u8)> {
    match config.kind {
        GeneratorKind::Fractal => {
            if let Some(m) = config.per_class {
                let class = index / m;
                let instance = index % m;
                let proto = &prototypes[class];
                let clip_seed = derive_seed(proto.seed, instance as u64);
                let (clip, params, used_seed) =
                    render_with_retries(clip_seed, config, |seed| {
                        mutate(&proto.params, &mut seeded_rng(seed))
                    })?;
                Ok((clip, Some(proto.class_id), used_seed, params.variation.id()))
            } else {
                let clip_seed = derive_seed(config.seed, index as u64);
                // 50/50 linear/nonlinear split by clip index parity
                let (clip, params, used_seed) =
                    render_with_retries(clip_seed, config, |seed| {
                        let mut rng = seeded_rng(seed);
                        if index % 2 == 0 {
                            sample_video_decomposed(&mut rng)
                        } else {
                            sample_video_nonlinear(&mut rng)
                        }
                    })?;
                Ok((clip, None, used_seed, params.variation.id()))
            }
        }
        GeneratorKind::Perlin => {
            let grid = PerlinLabel::grid();
            let class = index % grid.len();
            let clip_seed = derive_seed(config.seed, index as u64);
            let clip =
                perlin_clip(&grid[class], config.frames, config.height, config.width, clip_seed)?;
            Ok((clip, Some(class as u32), clip_seed, 0))
        }
        GeneratorKind::Octopus => {
            let clip_seed = derive_seed(config.seed, index as u64);
            let clip =
                octopus_clip_seeded(clip_seed, config.frames, config.height, config.width)?;
            Ok((clip, None, clip_seed, 0))
        }
        GeneratorKind::DeadLeaves => {
            let clip_seed = derive_seed(config.seed, index as u64);
            let clip =
                deadleaves_clip_seeded(clip_seed, config.frames, config.height, config.width)?;
            Ok((clip, None, clip_seed, 0))
        }
    }
}

fn clip_files_exist(config: &GenerateConfig, record: &ClipRecord) -> bool {
    let png_ok = !config.write_png
        || config.out_dir.join(&record.path).join("frame_000.png").exists();
    let fvid_ok =
        !config.write_fvid || config.out_dir.join(format!("{}.fvid", record.path)).exists();
    png_ok && fvid_ok
}

fn load_partial(config: &GenerateConfig) -> Vec<ClipRecord> {
    let path = config.out_dir.join(PARTIAL_FILE);
    let Ok(text) = std::fs::read_to_string(&path) else {
        return Vec::new();
    };
    text.lines().filter_map(|line| serde_json::from_str(line).ok()).collect()
}

/// Generate (or resume) a dataset. Clips whose files and partial-manifest
/// rows both already exist are skipped; everything else is (re)built. The
/// result is byte-identical regardless of worker count or interruption.
pub fn generate_dataset(config: &GenerateConfig) -> Result<DatasetManifest> {
    config.validate()?;
    let count = config.clip_count()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let prototypes = match (config.kind, config.classes) {
        (GeneratorKind::Fractal, Some(c)) => sample_renderable_prototypes(c, config.seed),
        _ => Vec::new(),
    };
    let existing: std::collections::HashMap<u64, ClipRecord> = load_partial(config)
        .into_iter()
        .filter(|r| clip_files_exist(config, r))
        .map(|r| (r.clip_id, r))
        .collect();

    let partial = Mutex::new(
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(config.out_dir.join(PARTIAL_FILE))?,
    );
    let results: Vec<Result<ClipRecord>> = map_indexed(count, config.workers, |index| {
        let clip_id = index as u64;
        if let Some(record) = existing.get(&clip_id) {
            return Ok(record.clone());
        }
        let (clip, class_id, seed, variation) = build_clip(config, &prototypes, index)?;
        let rel = clip_dir_name(clip_id);
        if config.write_png {
            write_png_frames(&config.out_dir.join(&rel), &clip)?;
        }
        if config.write_fvid {
            write_fvid(&config.out_dir.join(format!("{rel}.fvid")), &clip)?;
        }
        let stats = clip_stats(&clip);
        let record = ClipRecord {
            clip_id,
            class_id,
            seed,
            t: clip.len(),
            h: clip.height(),
            w: clip.width(),
            variation,
            aug_trace: None,
            aug_donors: Vec::new(),
            path: rel,
            occupancy_min: stats.occupancy_min,
            occupancy_mean: stats.occupancy_mean,
            occupancy_max: stats.occupancy_max,
            degenerate: clip.degenerate || stats.degenerate,
        };
        let line = serde_json::to_string(&record)?;
        {
            let mut file = partial.lock().expect("partial manifest lock");
            writeln!(file, "{line}")?;
        }
        Ok(record)
    });

    let mut clips = results.into_iter().collect::<Result<Vec<_>>>()?;
    clips.sort_by_key(|r| r.clip_id);
    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        master_seed: config.seed,
        generator: config.kind,
        classes: config.classes,
        per_class: config.per_class,
        prototypes,
        clips,
    };
    manifest.save(&config.out_dir)?;
    Ok(manifest)
}

/// Apply the augmentation stack to every clip of an existing dataset,
/// writing a new dataset whose manifest embeds the traces. Donors for clip i
/// are the next two clips in index order (wrapping).
pub fn augment_dataset(
    src_dir: &std::path::Path,
    out_dir: &std::path::Path,
    aug: &AugmentConfig,
    intensity: f64,
    seed: u64,
    workers: usize,
) -> Result<DatasetManifest> {
    aug.validate()?;
    let manifest = DatasetManifest::load(src_dir)?;
    let n = manifest.clips.len();
    if n == 0 {
        return Err(Error::Config("source dataset is empty".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let load = |i: usize| -> Result<Clip> {
        let record = &manifest.clips[i];
        super::qa::load_clip(src_dir, &record.path)
            .ok_or_else(|| Error::MissingFile(src_dir.join(&record.path)))
    };
    let results: Vec<Result<ClipRecord>> = map_indexed(n, workers, |i| {
        let clip = load(i)?;
        let donor_idx = [(i + 1) % n, (i + 2) % n];
        let donors: Vec<Clip> = if n >= 3 {
            donor_idx.iter().map(|j| load(*j)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let mut rng = seeded_rng(derive_seed(seed, i as u64));
        let (out, trace) = augment_clip(&clip, &donors, aug, intensity, &mut rng)?;
        let src = &manifest.clips[i];
        let rel = clip_dir_name(src.clip_id);
        write_png_frames(&out_dir.join(&rel), &out)?;
        write_fvid(&out_dir.join(format!("{rel}.fvid")), &out)?;
        let stats = clip_stats(&out);
        Ok(ClipRecord {
            aug_trace: Some(trace),
            aug_donors: if n >= 3 {
                donor_idx.iter().map(|j| manifest.clips[*j].clip_id).collect()
            } else {
                Vec::new()
            },
            path: rel,
            occupancy_min: stats.occupancy_min,
            occupancy_mean: stats.occupancy_mean,
            occupancy_max: stats.occupancy_max,
            degenerate: stats.degenerate,
            ..src.clone()
        })
    });
    let clips = results.into_iter().collect::<Result<Vec<_>>>()?;
    let out = DatasetManifest { clips, ..manifest };
    out.save(out_dir)?;
    Ok(out)
}
