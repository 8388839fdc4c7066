//! Command-line front end for generating, augmenting, and inspecting
//! fractal-video datasets.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fvgen::augment::AugmentConfig;
use fvgen::pipeline::{
    augment_dataset, generate_dataset, preview_strip, qa, qa_scan, DatasetManifest,
    GenerateConfig, GeneratorKind,
};

#[derive(Parser)]
#[command(name = "fvgen", version, about = "Deterministic fractal-video dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltKind {
    Perlin,
    Octopus,
    Leaves,
}

#[derive(Args, Default)]
struct CommonGen {
    /// TOML or JSON config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed controlling all randomness.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Frame count for alternative generators.
    #[arg(long)]
    frames: Option<usize>,
    /// Chaos-game iterations per frame.
    #[arg(long)]
    iterations: Option<u64>,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long)]
    workers: Option<usize>,
    /// Skip PNG frame directories.
    #[arg(long)]
    no_png: bool,
    /// Skip .fvid raw files.
    #[arg(long)]
    no_fvid: bool,
}

impl CommonGen {
    fn build(&self) -> Result<GenerateConfig, fvgen::Error> {
        let mut cfg = match &self.config {
            Some(path) => GenerateConfig::from_file(path)?,
            None => GenerateConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = self.width {
            cfg.width = v;
        }
        if let Some(v) = self.height {
            cfg.height = v;
        }
        if let Some(v) = self.frames {
            cfg.frames = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if self.no_png {
            cfg.write_png = false;
        }
        if self.no_fvid {
            cfg.write_fvid = false;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate unlabeled fractal clips (50% with a nonlinear variation).
    Generate {
        #[arg(long)]
        total: Option<usize>,
        #[command(flatten)]
        common: CommonGen,
    },
    /// Generate a labeled prototype+mutation dataset.
    GenerateClasses {
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long = "per-class")]
        per_class: Option<usize>,
        #[command(flatten)]
        common: CommonGen,
    },
    /// Generate one of the alternative synthetic families.
    Alt {
        #[arg(long, value_enum)]
        kind: AltKind,
        #[arg(long)]
        total: Option<usize>,
        #[command(flatten)]
        common: CommonGen,
    },
    /// Apply the augmentation stack to an existing dataset.
    Augment {
        /// Source dataset directory (holding manifest.json).
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Augmentation config file (TOML or JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Curriculum epoch used to derive the intensity.
        #[arg(long, default_value_t = 4)]
        epoch: u32,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Recompute occupancy QA for a dataset; report as JSON on stdout.
    Qa {
        /// Dataset directory or manifest.json path.
        manifest: PathBuf,
    },
    /// Write a horizontal frame-strip image for one clip directory.
    Preview {
        clip_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Output image path (default: <clip_dir>/preview.png).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), fvgen::Error> {
    match cli.command {
        Command::Generate { total, common } => {
            let mut cfg = common.build()?;
            cfg.kind = GeneratorKind::Fractal;
            if total.is_some() {
                cfg.total = total;
            }
            let manifest = generate_dataset(&cfg)?;
            eprintln!("wrote {} clips to {}", manifest.clips.len(), cfg.out_dir.display());
        }
        Command::GenerateClasses { classes, per_class, common } => {
            let mut cfg = common.build()?;
            cfg.kind = GeneratorKind::Fractal;
            if classes.is_some() {
                cfg.classes = classes;
            }
            if per_class.is_some() {
                cfg.per_class = per_class;
            }
            let manifest = generate_dataset(&cfg)?;
            eprintln!("wrote {} clips to {}", manifest.clips.len(), cfg.out_dir.display());
        }
        Command::Alt { kind, total, common } => {
            let mut cfg = common.build()?;
            cfg.kind = match kind {
                AltKind::Perlin => GeneratorKind::Perlin,
                AltKind::Octopus => GeneratorKind::Octopus,
                AltKind::Leaves => GeneratorKind::DeadLeaves,
            };
            if total.is_some() {
                cfg.total = total;
            }
            let manifest = generate_dataset(&cfg)?;
            eprintln!("wrote {} clips to {}", manifest.clips.len(), cfg.out_dir.display());
        }
        Command::Augment { dataset, out, config, seed, epoch, workers } => {
            let aug = match config {
                Some(path) => AugmentConfig::from_file(&path)?,
                None => AugmentConfig::default(),
            };
            let intensity = aug.intensity(epoch);
            let manifest =
                augment_dataset(&dataset, &out, &aug, intensity, seed, workers.unwrap_or(0))?;
            eprintln!("augmented {} clips into {}", manifest.clips.len(), out.display());
        }
        Command::Qa { manifest } => {
            let root = if manifest.is_dir() {
                manifest.clone()
            } else {
                manifest.parent().map(PathBuf::from).unwrap_or_default()
            };
            let loaded = DatasetManifest::load(&manifest)?;
            let report = qa_scan(&loaded, &root);
            // ignore broken pipes from e.g. `| head`
            let _ = writeln!(io::stdout(), "{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Preview { clip_dir, stride, out } => {
            let clip = qa::load_clip(
                clip_dir.parent().unwrap_or(&clip_dir),
                clip_dir
                    .file_name()
                    .and_then(|n| n.to_str())
                    .ok_or_else(|| fvgen::Error::Config("bad clip directory name".into()))?,
            )
            .ok_or_else(|| fvgen::Error::MissingFile(clip_dir.clone()))?;
            let strip = preview_strip(&clip, stride);
            let path = out.unwrap_or_else(|| clip_dir.join("preview.png"));
            strip.save(&path).map_err(fvgen::Error::from)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
