//! Clip transforms that imprint real-video properties onto synthetic clips.
//!
//! Each transform is split into a sampler (draws parameters from an RNG) and
//! a pure kernel (applies recorded parameters). The recorded parameters form
//! the augmentation trace; replaying a trace on the same input reproduces
//! the output bit-exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geom::{
    crop, crop_resize, hflip, paste, resize_bilinear, rotate_bilinear, warp_frame, Composite,
    Homography, Rect,
};
use crate::clip::Clip;
use crate::error::{Error, Result};

pub const BLEND_RANGE: (f64, f64) = (0.25, 0.55);
pub const STATIC_BACKGROUND_PROB: f64 = 0.8;
pub const DYNAMIC_INDEX_RANGE: i64 = 4;
pub const FG_SCALE_RANGE: (f64, f64) = (0.3, 1.0);
pub const GROUP_SCALE_RANGE: (f64, f64) = (0.2, 0.7);
pub const TRAVEL_RANGE: (f64, f64) = (0.05, 0.20);
pub const SHAKE_NOISE_BOUND: f64 = 0.3;

// ---------------------------------------------------------------------
// background mixing

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BackgroundMode {
    /// Two donor frames aggregated with pixelwise max.
    Static { donors: [usize; 2], frames: [usize; 2] },
    /// One donor, walked frame-by-frame with steps in {-1, 0, +1}.
    Dynamic { donor: usize, walk: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundParams {
    pub alpha: f64,
    pub crop: Rect,
    #[serde(flatten)]
    pub mode: BackgroundMode,
}

/// Random-rectangle crop parameters: area scale U(0.2, 1.0), aspect ratio
/// U(0.75, 1.33).
fn sample_crop_rect<R: Rng>(h: usize, w: usize, rng: &mut R) -> Rect {
    for _ in 0..20 {
        let scale: f64 = rng.random_range(0.2..1.0);
        let ratio: f64 = rng.random_range(0.75..1.33);
        let area = scale * (h * w) as f64;
        let cw = (area * ratio).sqrt().round() as usize;
        let ch = (area / ratio).sqrt().round() as usize;
        if cw >= 1 && ch >= 1 && cw <= w && ch <= h {
            let y = rng.random_range(0..=h - ch);
            let x = rng.random_range(0..=w - cw);
            return Rect { y, x, h: ch, w: cw };
        }
    }
    Rect { y: 0, x: 0, h, w }
}

pub fn sample_background_params<R: Rng>(
    fg: &Clip,
    donors: &[Clip],
    intensity: f64,
    rng: &mut R,
) -> Result<BackgroundParams> {
    if donors.len() < 2 {
        return Err(Error::NotEnoughDonors { needed: 2, got: donors.len() });
    }
    let alpha = rng.random_range(BLEND_RANGE.0..BLEND_RANGE.1) * intensity;
    let crop = sample_crop_rect(fg.height(), fg.width(), rng);
    let mode = if rng.random_bool(STATIC_BACKGROUND_PROB) {
        let a = rng.random_range(0..donors.len());
        let b = loop {
            let b = rng.random_range(0..donors.len());
            if b != a {
                break b;
            }
        };
        BackgroundMode::Static {
            donors: [a, b],
            frames: [rng.random_range(0..donors[a].len()), rng.random_range(0..donors[b].len())],
        }
    } else {
        let donor = rng.random_range(0..donors.len());
        let td = donors[donor].len() as i64;
        let start = rng.random_range(0..td);
        let mut walk = vec![start as usize];
        let (mut lo, mut hi, mut cur) = (start, start, start);
        for _ in 1..fg.len() {
            let candidates: Vec<i64> = [-1i64, 0, 1]
                .iter()
                .map(|s| cur + s)
                .filter(|&f| {
                    f >= 0
                        && f < td
                        && (f.max(hi) - f.min(lo)) <= DYNAMIC_INDEX_RANGE
                })
                .collect();
            cur = candidates[rng.random_range(0..candidates.len())];
            lo = lo.min(cur);
            hi = hi.max(cur);
            walk.push(cur as usize);
        }
        BackgroundMode::Dynamic { donor, walk }
    };
    Ok(BackgroundParams { alpha, crop, mode })
}

/// Blend a (static or slowly moving) donor background into every frame:
/// out = (1 - alpha) * fg + alpha * bg.
pub fn apply_background(fg: &Clip, donors: &[Clip], params: &BackgroundParams) -> Result<Clip> {
    if donors.len() < 2 {
        return Err(Error::NotEnoughDonors { needed: 2, got: donors.len() });
    }
    let (h, w) = (fg.height(), fg.width());
    let prep = |donor: &Clip, frame: usize| -> Vec<f32> {
        resize_bilinear(donor.frame(frame), donor.height(), donor.width(), h, w)
    };
    let a = params.alpha as f32;
    let mut out = fg.clone();
    match &params.mode {
        BackgroundMode::Static { donors: d, frames } => {
            let fa = prep(&donors[d[0]], frames[0]);
            let fb = prep(&donors[d[1]], frames[1]);
            let merged: Vec<f32> = fa.iter().zip(&fb).map(|(x, y)| x.max(*y)).collect();
            let bg = crop_resize(&merged, h, w, &params.crop, h, w);
            for t in 0..fg.len() {
                let frame = out.frame_mut(t);
                for (o, b) in frame.iter_mut().zip(&bg) {
                    *o = ((1.0 - a) * *o + a * b).clamp(0.0, 1.0);
                }
            }
        }
        BackgroundMode::Dynamic { donor, walk } => {
            if walk.len() != fg.len() {
                return Err(Error::InvalidParam("walk length != clip length".into()));
            }
            for t in 0..fg.len() {
                let full = prep(&donors[*donor], walk[t]);
                let bg = crop_resize(&full, h, w, &params.crop, h, w);
                let frame = out.frame_mut(t);
                for (o, b) in frame.iter_mut().zip(&bg) {
                    *o = ((1.0 - a) * *o + a * b).clamp(0.0, 1.0);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// foreground scaling and placement

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePlaceParams {
    pub sy: f64,
    pub sx: f64,
    pub y: usize,
    pub x: usize,
}

impl ScalePlaceParams {
    pub fn identity() -> Self {
        Self { sy: 1.0, sx: 1.0, y: 0, x: 0 }
    }
}

pub fn sample_scale_place<R: Rng>(
    fg: &Clip,
    s_range: (f64, f64),
    intensity: f64,
    rng: &mut R,
) -> ScalePlaceParams {
    let draw = |rng: &mut R| {
        let s = rng.random_range(s_range.0..=s_range.1);
        // curriculum pulls the scale toward the neutral value 1
        1.0 + (s - 1.0) * intensity
    };
    let sy = draw(rng);
    let sx = draw(rng);
    let nh = ((fg.height() as f64 * sy) as usize).max(1);
    let nw = ((fg.width() as f64 * sx) as usize).max(1);
    ScalePlaceParams {
        sy,
        sx,
        y: rng.random_range(0..=fg.height() - nh.min(fg.height())),
        x: rng.random_range(0..=fg.width() - nw.min(fg.width())),
    }
}

/// Downsample every frame and paste it at one shared canvas position; the
/// rest of the canvas is zero.
pub fn apply_scale_place(fg: &Clip, params: &ScalePlaceParams) -> Clip {
    let (h, w) = (fg.height(), fg.width());
    let nh = ((h as f64 * params.sy) as usize).clamp(1, h);
    let nw = ((w as f64 * params.sx) as usize).clamp(1, w);
    let mut out = Clip::zeros(fg.len(), h, w);
    out.degenerate = fg.degenerate;
    for t in 0..fg.len() {
        let small = resize_bilinear(fg.frame(t), h, w, nh, nw);
        paste(
            out.frame_mut(t),
            h,
            w,
            &small,
            nh,
            nw,
            params.y as i64,
            params.x as i64,
            Composite::Overwrite,
        );
    }
    out
}

// ---------------------------------------------------------------------
// group activity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneSpec {
    pub angle_rad: f64,
    pub flip: bool,
    pub t_offset: usize,
    pub place: ScalePlaceParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    pub clones: Vec<CloneSpec>,
}

pub const CLONE_COUNT: usize = 2;
pub const CLONE_MAX_ANGLE_DEG: f64 = 30.0;

pub fn sample_group_params<R: Rng>(fg: &Clip, intensity: f64, rng: &mut R) -> GroupParams {
    let max_offset = (fg.len() / 4).max(1);
    let clones = (0..CLONE_COUNT)
        .map(|_| CloneSpec {
            angle_rad: rng.random_range(-CLONE_MAX_ANGLE_DEG..CLONE_MAX_ANGLE_DEG).to_radians()
                * intensity,
            flip: rng.random_bool(0.5),
            t_offset: rng.random_range(1..=max_offset),
            place: sample_scale_place(fg, GROUP_SCALE_RANGE, intensity, rng),
        })
        .collect();
    GroupParams { clones }
}

/// Clone the clip; each copy gets a mild desynchronizing augmentation
/// (rotation, flip, circular temporal offset) and its own placement, then
/// the copies are composited with pixelwise max.
pub fn apply_group(fg: &Clip, params: &GroupParams) -> Clip {
    let (t_len, h, w) = (fg.len(), fg.height(), fg.width());
    let mut out = Clip::zeros(t_len, h, w);
    out.degenerate = fg.degenerate;
    for clone in &params.clones {
        let mut shifted = Clip::zeros(t_len, h, w);
        for t in 0..t_len {
            let src = fg.frame((t + clone.t_offset) % t_len);
            let mut frame = rotate_bilinear(src, h, w, clone.angle_rad);
            if clone.flip {
                frame = hflip(&frame, h, w);
            }
            shifted.frame_mut(t).copy_from_slice(&frame);
        }
        let placed = apply_scale_place(&shifted, &clone.place);
        for (o, p) in out.data_mut().iter_mut().zip(placed.data()) {
            *o = o.max(*p);
        }
    }
    out
}

// ---------------------------------------------------------------------
// perspective

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerspectiveParams {
    /// Displaced source corners (x, y) in order TL, TR, BR, BL; the output
    /// frame corners map onto these.
    pub corners: [[f64; 2]; 4],
}

pub fn frame_corners(h: usize, w: usize) -> [[f64; 2]; 4] {
    let (hw, hh) = ((w - 1) as f64, (h - 1) as f64);
    [[0.0, 0.0], [hw, 0.0], [hw, hh], [0.0, hh]]
}

pub fn sample_perspective_params<R: Rng>(
    h: usize,
    w: usize,
    distortion: f64,
    intensity: f64,
    rng: &mut R,
) -> Result<PerspectiveParams> {
    if !(0.0..=0.5).contains(&distortion) {
        return Err(Error::InvalidParam(format!("distortion {distortion} outside [0, 0.5]")));
    }
    let d = distortion * intensity;
    let (mx, my) = (d * w as f64 / 2.0, d * h as f64 / 2.0);
    for _ in 0..10 {
        let base = frame_corners(h, w);
        let mut corners = base;
        // displace each corner inward
        let signs = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        for i in 0..4 {
            corners[i][0] += signs[i][0] * rng.random_range(0.0..=mx);
            corners[i][1] += signs[i][1] * rng.random_range(0.0..=my);
        }
        if Homography::from_corners(&base, &corners).is_ok() {
            return Ok(PerspectiveParams { corners });
        }
    }
    Err(Error::InvalidParam("could not sample an invertible perspective".into()))
}

/// Warp every frame with one per-clip homography; it models a fixed camera
/// angle, so it must not vary frame to frame.
pub fn apply_perspective(clip: &Clip, params: &PerspectiveParams) -> Result<Clip> {
    let (h, w) = (clip.height(), clip.width());
    let hom = Homography::from_corners(&frame_corners(h, w), &params.corners)?;
    let mut out = clip.clone();
    for t in 0..clip.len() {
        let warped = warp_frame(clip.frame(t), h, w, &hom);
        out.frame_mut(t).copy_from_slice(&warped);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// relative displacement

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplaceMode {
    Foreground,
    Background,
    Camera,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplaceParams {
    pub mode: DisplaceMode,
    /// Total travel in pixels along each axis.
    pub dx: f64,
    pub dy: f64,
    /// Background blend weight (background and camera modes) or background
    /// brightness (foreground mode).
    pub alpha: f64,
    /// Foreground shrink factor (foreground mode only).
    pub fg_scale: f64,
    /// Donor clip index used as background, if any.
    pub bg_donor: Option<usize>,
}

pub fn sample_displace_params<R: Rng>(
    clip: &Clip,
    donor_count: usize,
    intensity: f64,
    rng: &mut R,
) -> DisplaceParams {
    let mode = if donor_count > 0 {
        match rng.random_range(0..3) {
            0 => DisplaceMode::Foreground,
            1 => DisplaceMode::Background,
            _ => DisplaceMode::Camera,
        }
    } else {
        DisplaceMode::Camera
    };
    let dim = clip.height().min(clip.width()) as f64;
    let travel = rng.random_range(TRAVEL_RANGE.0..TRAVEL_RANGE.1) * dim * intensity;
    let theta = rng.random_range(0.0..2.0 * std::f64::consts::PI);
    DisplaceParams {
        mode,
        dx: travel * theta.cos(),
        dy: travel * theta.sin(),
        alpha: rng.random_range(BLEND_RANGE.0..BLEND_RANGE.1) * intensity,
        fg_scale: 1.0 + (rng.random_range(0.3..0.7) - 1.0) * intensity,
        bg_donor: if mode == DisplaceMode::Camera { None } else { Some(rng.random_range(0..donor_count)) },
    }
}

fn travel_offsets(t_len: usize, dx: f64, dy: f64) -> Vec<(f64, f64)> {
    (0..t_len)
        .map(|t| {
            let u = if t_len == 1 { 0.0 } else { t as f64 / (t_len - 1) as f64 };
            (dx * (u - 0.5), dy * (u - 0.5))
        })
        .collect()
}

fn enlarge_frame(frame: &[f32], h: usize, w: usize, m: usize) -> Vec<f32> {
    resize_bilinear(frame, h, w, h + 2 * m, w + 2 * m)
}

fn crop_at(frame: &[f32], bw: usize, m: usize, h: usize, w: usize, oy: f64, ox: f64) -> Vec<f32> {
    let max_off = m as i64;
    let clamp_off = |o: f64| (o.round() as i64).clamp(-max_off, max_off);
    let rect = Rect {
        y: (m as i64 + clamp_off(oy)) as usize,
        x: (m as i64 + clamp_off(ox)) as usize,
        h,
        w,
    };
    crop(frame, bw, &rect)
}

/// Relative motion between foreground, background and camera, realized as a
/// straight-line window walk.
pub fn apply_displace(
    clip: &Clip,
    background: Option<&Clip>,
    params: &DisplaceParams,
) -> Result<Clip> {
    let (t_len, h, w) = (clip.len(), clip.height(), clip.width());
    let m = (params.dx.abs().max(params.dy.abs()) / 2.0).ceil() as usize;
    let offsets = travel_offsets(t_len, params.dx, params.dy);
    let a = params.alpha as f32;
    let mut out = Clip::zeros(t_len, h, w);
    out.degenerate = clip.degenerate;
    match params.mode {
        DisplaceMode::Background => {
            let bg = background.ok_or_else(|| {
                Error::InvalidParam("background displacement needs a background clip".into())
            })?;
            let big = enlarge_frame(
                &resize_bilinear(bg.frame(0), bg.height(), bg.width(), h, w),
                h,
                w,
                m,
            );
            for t in 0..t_len {
                let window = crop_at(&big, w + 2 * m, m, h, w, offsets[t].1, offsets[t].0);
                let dst = out.frame_mut(t);
                for ((o, f), b) in dst.iter_mut().zip(clip.frame(t)).zip(&window) {
                    *o = ((1.0 - a) * f + a * b).clamp(0.0, 1.0);
                }
            }
        }
        DisplaceMode::Camera => {
            let bg_frame = background
                .map(|bg| resize_bilinear(bg.frame(0), bg.height(), bg.width(), h, w));
            for t in 0..t_len {
                let blended: Vec<f32> = match &bg_frame {
                    Some(bg) => clip
                        .frame(t)
                        .iter()
                        .zip(bg)
                        .map(|(f, b)| ((1.0 - a) * f + a * b).clamp(0.0, 1.0))
                        .collect(),
                    None => clip.frame(t).to_vec(),
                };
                let big = enlarge_frame(&blended, h, w, m);
                let window = crop_at(&big, w + 2 * m, m, h, w, offsets[t].1, offsets[t].0);
                out.frame_mut(t).copy_from_slice(&window);
            }
        }
        DisplaceMode::Foreground => {
            let bg = background.ok_or_else(|| {
                Error::InvalidParam("foreground displacement needs a background clip".into())
            })?;
            let canvas: Vec<f32> =
                resize_bilinear(bg.frame(0), bg.height(), bg.width(), h, w)
                    .into_iter()
                    .map(|v| (a * v).clamp(0.0, 1.0))
                    .collect();
            let nh = ((h as f64 * params.fg_scale) as usize).clamp(1, h);
            let nw = ((w as f64 * params.fg_scale) as usize).clamp(1, w);
            let base_y = (h - nh) as f64 / 2.0;
            let base_x = (w - nw) as f64 / 2.0;
            for t in 0..t_len {
                let small = resize_bilinear(clip.frame(t), h, w, nh, nw);
                let dst = out.frame_mut(t);
                dst.copy_from_slice(&canvas);
                paste(
                    dst,
                    h,
                    w,
                    &small,
                    nh,
                    nw,
                    (base_y + offsets[t].1).round() as i64,
                    (base_x + offsets[t].0).round() as i64,
                    Composite::Max,
                );
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// camera zoom

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoomParams {
    /// Terminal field-of-view scale; the per-frame scale sweeps linearly
    /// from 1.0 to z.
    pub z: f64,
}

pub const ZOOM_RANGE: (f64, f64) = (0.5, 1.5);
pub const ZOOM_DEADBAND: (f64, f64) = (0.95, 1.05);

pub fn sample_zoom_params<R: Rng>(
    z_range: (f64, f64),
    intensity: f64,
    rng: &mut R,
) -> ZoomParams {
    let mut z = 1.0;
    for _ in 0..100 {
        let candidate = rng.random_range(z_range.0..z_range.1);
        if candidate <= ZOOM_DEADBAND.0 || candidate >= ZOOM_DEADBAND.1 {
            z = candidate;
            break;
        }
    }
    ZoomParams { z: 1.0 + (z - 1.0) * intensity }
}

/// Per-frame central crop with a linearly swept scale, resized back to the
/// original dimensions.
pub fn apply_zoom(clip: &Clip, params: &ZoomParams) -> Clip {
    let (t_len, h, w) = (clip.len(), clip.height(), clip.width());
    let k = params.z.max(1.0);
    let (uh, uw) = ((h as f64 * k).round() as usize, (w as f64 * k).round() as usize);
    let mut out = clip.clone();
    for t in 0..t_len {
        let u = if t_len == 1 { 0.0 } else { t as f64 / (t_len - 1) as f64 };
        let s = 1.0 + (params.z - 1.0) * u;
        let big = resize_bilinear(clip.frame(t), h, w, uh, uw);
        let ch = ((h as f64 * s).round() as usize).clamp(1, uh);
        let cw = ((w as f64 * s).round() as usize).clamp(1, uw);
        let rect = Rect { y: (uh - ch) / 2, x: (uw - cw) / 2, h: ch, w: cw };
        let frame = crop_resize(&big, uh, uw, &rect, h, w);
        out.frame_mut(t).copy_from_slice(&frame);
    }
    out
}

// ---------------------------------------------------------------------
// camera shake

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShakeParams {
    pub amplitude_px: f64,
    /// Per-frame pixel offsets, already rescaled to the amplitude.
    pub ox: Vec<f64>,
    pub oy: Vec<f64>,
}

/// Raw displacement sequence d_t = sum_{i=1..n} (1/i) sin(2 pi f_i t + phi_i)
/// + eta_t for t = 1..T, plus its theoretical bound sum(1/i) + 0.3.
pub fn shake_sequence<R: Rng>(t_len: usize, rng: &mut R) -> (Vec<f64>, f64) {
    let n = rng.random_range(2..=5usize);
    let comps: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (rng.random_range(0.1..1.2), rng.random_range(0.0..2.0 * std::f64::consts::PI))
        })
        .collect();
    let values = (1..=t_len)
        .map(|t| {
            let mut d = 0.0;
            for (i, (f, phi)) in comps.iter().enumerate() {
                d += (2.0 * std::f64::consts::PI * f * t as f64 + phi).sin() / (i + 1) as f64;
            }
            d + rng.random_range(-SHAKE_NOISE_BOUND..SHAKE_NOISE_BOUND)
        })
        .collect();
    let bound = (1..=n).map(|i| 1.0 / i as f64).sum::<f64>() + SHAKE_NOISE_BOUND;
    (values, bound)
}

pub fn sample_shake_params<R: Rng>(
    t_len: usize,
    amplitude_px: f64,
    intensity: f64,
    rng: &mut R,
) -> ShakeParams {
    let amplitude = amplitude_px * intensity;
    let (dx, bx) = shake_sequence(t_len, rng);
    let (dy, by) = shake_sequence(t_len, rng);
    ShakeParams {
        amplitude_px: amplitude,
        ox: dx.into_iter().map(|d| d / bx * amplitude).collect(),
        oy: dy.into_iter().map(|d| d / by * amplitude).collect(),
    }
}

/// Oscillating window crop from a slightly enlarged clip.
pub fn apply_shake(clip: &Clip, params: &ShakeParams) -> Clip {
    let (t_len, h, w) = (clip.len(), clip.height(), clip.width());
    let m = params.amplitude_px.abs().ceil() as usize;
    if m == 0 {
        return clip.clone();
    }
    let mut out = clip.clone();
    for t in 0..t_len {
        let big = enlarge_frame(clip.frame(t), h, w, m);
        let window = crop_at(&big, w + 2 * m, m, h, w, params.oy[t], params.ox[t]);
        out.frame_mut(t).copy_from_slice(&window);
    }
    out
}
