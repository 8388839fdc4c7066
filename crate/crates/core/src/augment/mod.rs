//! Domain-adaptation transforms: background mixing, placement, group
//! activity, perspective, relative displacement, camera zoom and shake.

pub mod geom;
pub mod ops;

use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded_rng, Rng};
use ops::{
    apply_background, apply_displace, apply_group, apply_perspective, apply_scale_place,
    apply_shake, apply_zoom, sample_background_params, sample_displace_params,
    sample_group_params, sample_perspective_params, sample_scale_place, sample_shake_params,
    sample_zoom_params, BackgroundParams, DisplaceParams, GroupParams, PerspectiveParams,
    ScalePlaceParams, ShakeParams, ZoomParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub p_background: f64,
    pub p_scale: f64,
    pub p_perspective: f64,
    pub p_group: f64,
    pub p_displace: f64,
    pub p_zoom: f64,
    pub p_shake: f64,
    /// Epochs over which transform intensity ramps linearly from 0 to 1.
    pub curriculum_epochs: u32,
    pub scale_range: (f64, f64),
    pub group_scale_range: (f64, f64),
    pub perspective_distortion: f64,
    pub zoom_range: (f64, f64),
    pub shake_amplitude_px: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            p_background: 1.0,
            p_scale: 1.0,
            p_perspective: 0.8,
            p_group: 0.15,
            p_displace: 0.3,
            p_zoom: 0.3,
            p_shake: 0.3,
            curriculum_epochs: 5,
            scale_range: (0.3, 1.0),
            group_scale_range: ops::GROUP_SCALE_RANGE,
            perspective_distortion: 0.4,
            zoom_range: ops::ZOOM_RANGE,
            shake_amplitude_px: 4.0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_background", self.p_background),
            ("p_scale", self.p_scale),
            ("p_perspective", self.p_perspective),
            ("p_group", self.p_group),
            ("p_displace", self.p_displace),
            ("p_zoom", self.p_zoom),
            ("p_shake", self.p_shake),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        for (name, (lo, hi)) in [
            ("scale_range", self.scale_range),
            ("group_scale_range", self.group_scale_range),
            ("zoom_range", self.zoom_range),
        ] {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("{name} = ({lo}, {hi}) is empty")));
            }
        }
        if !(0.0..=0.5).contains(&self.perspective_distortion) {
            return Err(Error::Config("perspective_distortion outside [0, 0.5]".into()));
        }
        if self.shake_amplitude_px < 0.0 {
            return Err(Error::Config("shake_amplitude_px must be >= 0".into()));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingFile(path.to_path_buf()))?;
        let config: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?,
            _ => serde_json::from_str(&text)?,
        };
        config.validate()?;
        Ok(config)
    }

    /// Curriculum intensity for a 0-based epoch: ramps linearly to 1 over
    /// `curriculum_epochs` epochs, then stays at 1.
    pub fn intensity(&self, epoch: u32) -> f64 {
        if self.curriculum_epochs == 0 {
            return 1.0;
        }
        (((epoch + 1) as f64) / self.curriculum_epochs as f64).min(1.0)
    }
}

/// One applied transform with the exact parameters used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AugOp {
    Background(BackgroundParams),
    Scale(ScalePlaceParams),
    Group(GroupParams),
    Perspective(PerspectiveParams),
    Displace(DisplaceParams),
    Zoom(ZoomParams),
    Shake(ShakeParams),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AugTrace {
    pub ops: Vec<AugOp>,
}

fn apply_op(clip: &Clip, op: &AugOp, donors: &[Clip]) -> Result<Clip> {
    Ok(match op {
        AugOp::Background(p) => apply_background(clip, donors, p)?,
        AugOp::Scale(p) => apply_scale_place(clip, p),
        AugOp::Group(p) => apply_group(clip, p),
        AugOp::Perspective(p) => apply_perspective(clip, p)?,
        AugOp::Displace(p) => {
            let bg = match p.bg_donor {
                Some(i) => Some(donors.get(i).ok_or_else(|| {
                    Error::InvalidParam(format!("displace donor {i} out of range"))
                })?),
                None => None,
            };
            apply_displace(clip, bg, p)?
        }
        AugOp::Zoom(p) => apply_zoom(clip, p),
        AugOp::Shake(p) => apply_shake(clip, p),
    })
}

/// Re-apply a recorded trace. With the same input clip and donor list this
/// reproduces the augmented output bit-exactly.
pub fn replay_trace(clip: &Clip, trace: &AugTrace, donors: &[Clip]) -> Result<Clip> {
    let mut out = clip.clone();
    for op in &trace.ops {
        out = apply_op(&out, op, donors)?;
    }
    Ok(out)
}

/// Sample and apply the full transform stack in its fixed order. Background
/// mixing is skipped (not an error) when fewer than two donors exist.
pub fn augment_clip(
    clip: &Clip,
    donors: &[Clip],
    config: &AugmentConfig,
    intensity: f64,
    rng: &mut Rng,
) -> Result<(Clip, AugTrace)> {
    config.validate()?;
    let mut out = clip.clone();
    let mut trace = AugTrace::default();
    let push = |out: &mut Clip, trace: &mut AugTrace, op: AugOp| -> Result<()> {
        *out = apply_op(out, &op, donors)?;
        trace.ops.push(op);
        Ok(())
    };

    if donors.len() >= 2 && rng.random_bool(config.p_background) {
        let p = sample_background_params(&out, donors, intensity, rng)?;
        push(&mut out, &mut trace, AugOp::Background(p))?;
    }
    if rng.random_bool(config.p_scale) {
        let p = sample_scale_place(&out, config.scale_range, intensity, rng);
        push(&mut out, &mut trace, AugOp::Scale(p))?;
    }
    if rng.random_bool(config.p_group) {
        let p = sample_group_params(&out, intensity, rng);
        push(&mut out, &mut trace, AugOp::Group(p))?;
    }
    if rng.random_bool(config.p_perspective) {
        let p = sample_perspective_params(
            out.height(),
            out.width(),
            config.perspective_distortion,
            intensity,
            rng,
        )?;
        push(&mut out, &mut trace, AugOp::Perspective(p))?;
    }
    if rng.random_bool(config.p_displace) {
        let p = sample_displace_params(&out, donors.len(), intensity, rng);
        push(&mut out, &mut trace, AugOp::Displace(p))?;
    }
    if rng.random_bool(config.p_zoom) {
        let p = sample_zoom_params(config.zoom_range, intensity, rng);
        push(&mut out, &mut trace, AugOp::Zoom(p))?;
    }
    if rng.random_bool(config.p_shake) {
        let p = sample_shake_params(out.len(), config.shake_amplitude_px, intensity, rng);
        push(&mut out, &mut trace, AugOp::Shake(p))?;
    }
    Ok((out, trace))
}

/// Camera-style transforms drawn once and applied identically to every clip
/// in a batch; background, scale and group stay per-sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SharedDraw {
    pub perspective: Option<PerspectiveParams>,
    pub displace: Option<DisplaceParams>,
    pub zoom: Option<ZoomParams>,
    pub shake: Option<ShakeParams>,
}

pub fn sample_shared_draw(
    t_len: usize,
    h: usize,
    w: usize,
    donor_count: usize,
    config: &AugmentConfig,
    intensity: f64,
    rng: &mut Rng,
) -> Result<SharedDraw> {
    let probe = Clip::zeros(t_len, h, w);
    Ok(SharedDraw {
        perspective: rng
            .random_bool(config.p_perspective)
            .then(|| sample_perspective_params(h, w, config.perspective_distortion, intensity, rng))
            .transpose()?,
        displace: rng
            .random_bool(config.p_displace)
            .then(|| sample_displace_params(&probe, donor_count, intensity, rng)),
        zoom: rng
            .random_bool(config.p_zoom)
            .then(|| sample_zoom_params(config.zoom_range, intensity, rng)),
        shake: rng
            .random_bool(config.p_shake)
            .then(|| sample_shake_params(t_len, config.shake_amplitude_px, intensity, rng)),
    })
}

/// Batch-shared augmentation: per-sample draws for background, scale and
/// group, one shared draw for the camera-style transforms. Donors for clip i
/// are all other clips of the batch. All clips must share one shape.
pub fn augment_batch(
    clips: &[Clip],
    config: &AugmentConfig,
    intensity: f64,
    seed: u64,
) -> Result<Vec<(Clip, AugTrace)>> {
    config.validate()?;
    if clips.is_empty() {
        return Ok(Vec::new());
    }
    let (t_len, h, w) = (clips[0].len(), clips[0].height(), clips[0].width());
    if clips.iter().any(|c| (c.len(), c.height(), c.width()) != (t_len, h, w)) {
        return Err(Error::InvalidParam("batch clips must share one shape".into()));
    }
    let donor_count = clips.len().saturating_sub(1);
    let mut shared_rng = seeded_rng(derive_seed(seed, u64::MAX));
    let shared =
        sample_shared_draw(t_len, h, w, donor_count, config, intensity, &mut shared_rng)?;

    clips
        .iter()
        .enumerate()
        .map(|(i, clip)| {
            let donors: Vec<Clip> = clips
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let mut rng = seeded_rng(derive_seed(seed, i as u64));
            let mut out = clip.clone();
            let mut trace = AugTrace::default();
            let push = |out: &mut Clip, trace: &mut AugTrace, op: AugOp| -> Result<()> {
                *out = apply_op(out, &op, &donors)?;
                trace.ops.push(op);
                Ok(())
            };
            if donors.len() >= 2 && rng.random_bool(config.p_background) {
                let p = sample_background_params(&out, &donors, intensity, &mut rng)?;
                push(&mut out, &mut trace, AugOp::Background(p))?;
            }
            if rng.random_bool(config.p_scale) {
                let p = sample_scale_place(&out, config.scale_range, intensity, &mut rng);
                push(&mut out, &mut trace, AugOp::Scale(p))?;
            }
            if rng.random_bool(config.p_group) {
                let p = sample_group_params(&out, intensity, &mut rng);
                push(&mut out, &mut trace, AugOp::Group(p))?;
            }
            if let Some(p) = &shared.perspective {
                push(&mut out, &mut trace, AugOp::Perspective(p.clone()))?;
            }
            if let Some(p) = &shared.displace {
                push(&mut out, &mut trace, AugOp::Displace(p.clone()))?;
            }
            if let Some(p) = &shared.zoom {
                push(&mut out, &mut trace, AugOp::Zoom(*p))?;
            }
            if let Some(p) = &shared.shake {
                push(&mut out, &mut trace, AugOp::Shake(p.clone()))?;
            }
            Ok((out, trace))
        })
        .collect()
}
