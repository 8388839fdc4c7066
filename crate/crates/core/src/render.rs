//! Chaos-game rendering of IFS parameter sets into frames and clips.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clip::{Clip, Frame};
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::motion::ClipParams;
use crate::rng::{derive_seed, seeded_rng};
use crate::variations::{apply_variation, VariationId};

/// Iterations discarded before the histogram starts accumulating.
pub const BURN_IN: u64 = 50;

/// Default per-frame iteration budget at 256x256.
pub const DEFAULT_ITERATIONS: u64 = 100_000;

/// Iteration budget of the cheap per-frame pass that sizes the viewport.
pub const VIEWPORT_PASS_ITERATIONS: u64 = 10_000;

/// Attractor-space window rendered into the pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Viewport {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if x_min < x_max && y_min < y_max {
            Ok(Self { x_min, x_max, y_min, y_max })
        } else {
            Err(Error::InvalidParam(format!(
                "degenerate viewport [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )))
        }
    }

    pub fn unit_centered() -> Self {
        Self { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 }
    }

    /// Grow the window by `fraction` of its extent on every side.
    pub fn expanded(&self, fraction: f64) -> Self {
        let mx = (self.x_max - self.x_min) * fraction;
        let my = (self.y_max - self.y_min) * fraction;
        Self {
            x_min: self.x_min - mx,
            x_max: self.x_max + mx,
            y_min: self.y_min - my,
            y_max: self.y_max + my,
        }
    }

    pub fn union(&self, other: &Viewport) -> Self {
        Self {
            x_min: self.x_min.min(other.x_min),
            x_max: self.x_max.max(other.x_max),
            y_min: self.y_min.min(other.y_min),
            y_max: self.y_max.max(other.y_max),
        }
    }
}

/// Run the chaos game, invoking `visit` for every post-burn-in point.
/// Non-finite points reset to the origin; the reset count is returned.
fn iterate_points<R: Rng, F: FnMut(f64, f64)>(
    system: &IfsSystem,
    variation: VariationId,
    iterations: u64,
    rng: &mut R,
    mut visit: F,
) -> u64 {
    let mut x: f64 = rng.random_range(-1.0..1.0);
    let mut y: f64 = rng.random_range(-1.0..1.0);
    let mut resets = 0u64;
    for i in 0..iterations {
        let k = system.sample_index(rng);
        let map = &system.maps()[k];
        let (fx, fy) = map.apply(x, y);
        let (gx, gy) = apply_variation((fx, fy), variation, (map.c, map.f));
        if !gx.is_finite() || !gy.is_finite() {
            x = 0.0;
            y = 0.0;
            resets += 1;
            continue;
        }
        x = gx;
        y = gy;
        if i >= BURN_IN {
            visit(x, y);
        }
    }
    resets
}

/// Render one frame: accumulate the point histogram over the viewport grid
/// and normalize by its maximum. Out-of-viewport points hit no pixel but the
/// iteration continues. Errors out if more than 1% of iterations reset.
pub fn chaos_game<R: Rng>(
    system: &IfsSystem,
    variation: VariationId,
    iterations: u64,
    viewport: &Viewport,
    width: usize,
    height: usize,
    rng: &mut R,
) -> Result<Frame> {
    if iterations < 1000 {
        return Err(Error::InvalidParam(format!(
            "chaos game needs >= 1000 iterations, got {iterations}"
        )));
    }
    let mut hist = vec![0u32; width * height];
    let sx = width as f64 / (viewport.x_max - viewport.x_min);
    let sy = height as f64 / (viewport.y_max - viewport.y_min);
    let resets = iterate_points(system, variation, iterations, rng, |x, y| {
        let px = (x - viewport.x_min) * sx;
        let py = (y - viewport.y_min) * sy;
        if px >= 0.0 && py >= 0.0 {
            let (px, py) = (px as usize, py as usize);
            if px < width && py < height {
                hist[py * width + px] += 1;
            }
        }
    });
    if resets * 100 > iterations {
        return Err(Error::DivergentRender { resets, iterations });
    }
    let max = *hist.iter().max().unwrap_or(&0);
    let values = if max == 0 {
        vec![0.0; width * height]
    } else {
        let inv = 1.0 / max as f32;
        hist.into_iter().map(|h| h as f32 * inv).collect()
    };
    Ok(Frame { width, height, values })
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Shared viewport for a whole clip: per frame, a cheap pass collects point
/// coordinates; the union bounding box of the 1st-99th percentiles is
/// expanded by a 5% margin. Keeping one viewport per clip avoids per-frame
/// re-normalization jitter.
pub fn clip_viewport(params: &ClipParams, clip_seed: u64) -> Result<Viewport> {
    let vp_seed = derive_seed(clip_seed, u64::MAX);
    let mut combined: Option<Viewport> = None;
    for t in 0..params.frames() {
        let system = params.frame_system(t)?;
        let mut rng = seeded_rng(derive_seed(vp_seed, t as u64));
        let mut xs = Vec::with_capacity(VIEWPORT_PASS_ITERATIONS as usize);
        let mut ys = Vec::with_capacity(VIEWPORT_PASS_ITERATIONS as usize);
        iterate_points(&system, params.variation, VIEWPORT_PASS_ITERATIONS, &mut rng, |x, y| {
            xs.push(x);
            ys.push(y);
        });
        if xs.is_empty() {
            continue;
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let frame_box = Viewport {
            x_min: percentile(&xs, 0.01),
            x_max: percentile(&xs, 0.99),
            y_min: percentile(&ys, 0.01),
            y_max: percentile(&ys, 0.99),
        };
        combined = Some(match combined {
            Some(v) => v.union(&frame_box),
            None => frame_box,
        });
    }
    let vp = combined.unwrap_or_else(Viewport::unit_centered).expanded(0.05);
    if vp.x_max - vp.x_min < 1e-9 || vp.y_max - vp.y_min < 1e-9 {
        return Ok(Viewport::unit_centered());
    }
    Ok(vp)
}

/// Fraction of empty frames above which a clip is flagged degenerate.
pub const DEGENERATE_EMPTY_FRACTION: f64 = 0.3;

/// Render a full clip into a shared viewport. The per-frame generator is
/// derived from (clip_seed, frame index), so frames can be rendered in any
/// order or in parallel with identical output.
pub fn render_clip(
    params: &ClipParams,
    width: usize,
    height: usize,
    iterations_per_frame: u64,
    clip_seed: u64,
) -> Result<Clip> {
    let viewport = clip_viewport(params, clip_seed)?;
    render_clip_in_viewport(params, width, height, iterations_per_frame, clip_seed, &viewport)
}

pub fn render_clip_in_viewport(
    params: &ClipParams,
    width: usize,
    height: usize,
    iterations_per_frame: u64,
    clip_seed: u64,
    viewport: &Viewport,
) -> Result<Clip> {
    let mut frames = Vec::with_capacity(params.frames());
    for t in 0..params.frames() {
        let system = params.frame_system(t)?;
        let mut rng = seeded_rng(derive_seed(clip_seed, t as u64));
        frames.push(chaos_game(
            &system,
            params.variation,
            iterations_per_frame,
            viewport,
            width,
            height,
            &mut rng,
        )?);
    }
    let empty = frames.iter().filter(|f| f.max_value() == 0.0).count();
    let mut clip = Clip::from_frames(frames);
    clip.degenerate = empty as f64 > DEGENERATE_EMPTY_FRACTION * params.frames() as f64;
    Ok(clip)
}

/// The canonical three-map half-scale system (corner translations at the
/// origin, (0.5, 0) and (0, 0.5)); its attractor fills three quadrants of
/// the unit square and leaves the fourth empty at every scale.
pub fn sierpinski_system() -> IfsSystem {
    let rows = [
        [0.5, 0.0, 0.0, 0.5, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.5, 0.5, 0.0],
        [0.5, 0.0, 0.0, 0.5, 0.0, 0.5],
    ];
    IfsSystem::from_rows(&rows).unwrap()
}
