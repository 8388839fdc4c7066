//! "Octopus" clips: random 2D curves conjoined at a fixed junction point,
//! thickened by Gaussian blur, binarization and morphological closing.


use serde::{Deserialize, Serialize};

use super::morph::{closing, draw_segment, gaussian_blur, gradient, stamp_shape, ShapeKind};
use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::motion::{eval_interpolant, sample_random_interp, InterpolantSpec};
use crate::rng::{seeded_rng, Rng};

pub const CURVE_SAMPLES: usize = 160;
pub const BINARIZE_THRESHOLD: f32 = 0.2;

/// One arm of the octopus. The spatial waveforms shape the curve along its
/// arc parameter; the endpoint interpolates between two keyframe offsets
/// over the clip, the same mechanism as IFS keyframe interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub wave_x: InterpolantSpec,
    pub wave_y: InterpolantSpec,
    /// Endpoint offsets from the junction (normalized units) at the start
    /// and end keyframes.
    pub offset_start: [f64; 2],
    pub offset_end: [f64; 2],
    pub temporal: InterpolantSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctopusSpec {
    pub curves: Vec<CurveSpec>,
    /// Junction point in normalized [0,1]^2 coordinates (x, y).
    pub junction: [f64; 2],
    pub blur_sigma: f64,
    pub closing_radius: usize,
    /// Keep only the morphological gradient (outline) of the mask.
    pub hollow: bool,
    /// Static geometric shapes composited behind the curves.
    pub shapes: Vec<StaticShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticShape {
    pub kind: ShapeKind,
    /// Center (x, y), normalized.
    pub center: [f64; 2],
    /// Radius as a fraction of min(H, W).
    pub radius: f64,
    pub gray: f64,
}

impl OctopusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.curves.len() < 2 {
            return Err(Error::InvalidParam("octopus needs at least 2 curves".into()));
        }
        if self.closing_radius < 1 {
            return Err(Error::InvalidParam("closing radius must be >= 1 px".into()));
        }
        if self.blur_sigma < 0.0 {
            return Err(Error::InvalidParam("blur sigma must be >= 0".into()));
        }
        Ok(())
    }
}

pub fn sample_octopus_spec<R: rand::Rng>(rng: &mut R) -> OctopusSpec {
    let n = rng.random_range(3..=8usize);
    let curves = (0..n)
        .map(|_| {
            let reach = rng.random_range(0.25..0.6);
            let theta = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let drift = rng.random_range(-0.8..0.8f64);
            CurveSpec {
                wave_x: sample_random_interp(rng),
                wave_y: sample_random_interp(rng),
                offset_start: [reach * theta.cos(), reach * theta.sin()],
                offset_end: [
                    reach * (theta + drift).cos(),
                    reach * (theta + drift).sin(),
                ],
                temporal: sample_random_interp(rng),
            }
        })
        .collect();
    let shapes = (0..rng.random_range(0..3usize))
        .map(|_| StaticShape {
            kind: if rng.random_bool(0.5) {
                ShapeKind::Circle
            } else {
                ShapeKind::Polygon {
                    k: rng.random_range(3..=8),
                    angle_rad: rng.random_range(0.0..std::f64::consts::TAU),
                }
            },
            center: [rng.random_range(0.1..0.9), rng.random_range(0.1..0.9)],
            radius: rng.random_range(0.05..0.15),
            gray: rng.random_range(0.2..0.6),
        })
        .collect();
    OctopusSpec {
        curves,
        junction: [rng.random_range(0.3..0.7), rng.random_range(0.3..0.7)],
        blur_sigma: rng.random_range(0.6..1.2),
        closing_radius: rng.random_range(1..=2usize),
        hollow: rng.random_bool(0.3),
        shapes,
    }
}

/// Curve position at arc parameter s and clip position u, in pixels (y, x).
fn curve_point(spec: &OctopusSpec, curve: &CurveSpec, s: f64, u: f64, h: usize, w: usize) -> (f64, f64) {
    let blend = eval_interpolant(&curve.temporal, u);
    let off_x = curve.offset_start[0] + (curve.offset_end[0] - curve.offset_start[0]) * blend;
    let off_y = curve.offset_start[1] + (curve.offset_end[1] - curve.offset_start[1]) * blend;
    let x = spec.junction[0] + off_x * eval_interpolant(&curve.wave_x, s);
    let y = spec.junction[1] + off_y * eval_interpolant(&curve.wave_y, s);
    (y * (h - 1) as f64, x * (w - 1) as f64)
}

pub fn octopus_frame(spec: &OctopusSpec, u: f64, h: usize, w: usize) -> Vec<f32> {
    let mut mask = vec![false; h * w];
    for curve in &spec.curves {
        let mut prev = curve_point(spec, curve, 0.0, u, h, w);
        for i in 1..=CURVE_SAMPLES {
            let s = i as f64 / CURVE_SAMPLES as f64;
            let next = curve_point(spec, curve, s, u, h, w);
            draw_segment(&mut mask, h, w, prev, next);
            prev = next;
        }
    }
    let strokes: Vec<f32> = mask.iter().map(|m| if *m { 1.0 } else { 0.0 }).collect();
    let blurred = gaussian_blur(&strokes, h, w, spec.blur_sigma);
    let binary: Vec<bool> =
        blurred.iter().zip(&mask).map(|(v, m)| *m || *v >= BINARIZE_THRESHOLD).collect();
    let mut closed = closing(&binary, h, w, spec.closing_radius);
    if spec.hollow {
        closed = gradient(&closed, h, w, 1);
        // the junction always stays lit, hollow or not
        let (jy, jx) = junction_pixel(spec, h, w);
        closed[jy * w + jx] = true;
    }
    let mut frame = vec![0.0f32; h * w];
    for shape in &spec.shapes {
        stamp_shape(
            &mut frame,
            h,
            w,
            &shape.kind,
            shape.center[1] * (h - 1) as f64,
            shape.center[0] * (w - 1) as f64,
            shape.radius * h.min(w) as f64,
            shape.gray as f32,
        );
    }
    for (f, c) in frame.iter_mut().zip(&closed) {
        if *c {
            *f = 1.0;
        }
    }
    frame
}

pub fn junction_pixel(spec: &OctopusSpec, h: usize, w: usize) -> (usize, usize) {
    (
        (spec.junction[1] * (h - 1) as f64).round() as usize,
        (spec.junction[0] * (w - 1) as f64).round() as usize,
    )
}

pub fn octopus_clip(spec: &OctopusSpec, t: usize, h: usize, w: usize) -> Result<Clip> {
    spec.validate()?;
    let mut clip = Clip::zeros(t, h, w);
    for ti in 0..t {
        let u = if t == 1 { 0.0 } else { ti as f64 / (t - 1) as f64 };
        clip.frame_mut(ti).copy_from_slice(&octopus_frame(spec, u, h, w));
    }
    Ok(clip)
}

/// Convenience wrapper: sample a spec from a seed and render it.
pub fn octopus_clip_seeded(seed: u64, t: usize, h: usize, w: usize) -> Result<Clip> {
    let mut rng: Rng = seeded_rng(seed);
    octopus_clip(&sample_octopus_spec(&mut rng), t, h, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn every_frame_contains_the_junction() {
        for seed in 0..30u64 {
            let mut rng = seeded_rng(seed);
            let spec = sample_octopus_spec(&mut rng);
            let clip = octopus_clip(&spec, 6, 48, 48).unwrap();
            let (jy, jx) = junction_pixel(&spec, 48, 48);
            for t in 0..6 {
                assert!(clip.get(t, jy, jx) > 0.0, "seed {seed} frame {t}");
            }
        }
    }

    #[test]
    fn closing_extensivity_on_rendered_strokes() {
        let mut rng = seeded_rng(4);
        let spec = sample_octopus_spec(&mut rng);
        let (h, w) = (48, 48);
        let mut mask = vec![false; h * w];
        for curve in &spec.curves {
            let mut prev = curve_point(&spec, curve, 0.0, 0.0, h, w);
            for i in 1..=CURVE_SAMPLES {
                let s = i as f64 / CURVE_SAMPLES as f64;
                let next = curve_point(&spec, curve, s, 0.0, h, w);
                draw_segment(&mut mask, h, w, prev, next);
                prev = next;
            }
        }
        let closed = closing(&mask, h, w, spec.closing_radius);
        for (i, (m, c)) in mask.iter().zip(&closed).enumerate() {
            assert!(!m || *c, "pixel {i} lost by closing");
        }
    }

    #[test]
    fn rejects_single_curve() {
        let mut rng = seeded_rng(1);
        let mut spec = sample_octopus_spec(&mut rng);
        spec.curves.truncate(1);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn deterministic_and_unit_range() {
        let a = octopus_clip_seeded(9, 5, 40, 40).unwrap();
        let b = octopus_clip_seeded(9, 5, 40, 40).unwrap();
        assert_eq!(a.data(), b.data());
        assert!(a.in_unit_range());
    }

    #[test]
    fn spec_json_roundtrip() {
        let mut rng = seeded_rng(12);
        let spec = sample_octopus_spec(&mut rng);
        let text = serde_json::to_string(&spec).unwrap();
        let back: OctopusSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
