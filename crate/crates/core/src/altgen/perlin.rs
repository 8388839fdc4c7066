//! 3D gradient-lattice (Perlin) noise clips. The two spatial frequencies and
//! one temporal frequency form the class label.

use serde::{Deserialize, Serialize};

use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::rng::splitmix64;

/// Per-axis frequency grid; 4^3 = 64 classes by default.
pub const FREQUENCY_GRID: [u32; 4] = [2, 4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerlinLabel {
    /// Spatial cycles across the frame width.
    pub f_x: u32,
    /// Spatial cycles across the frame height.
    pub f_y: u32,
    /// Temporal cycles across the clip.
    pub f_t: u32,
}

impl PerlinLabel {
    pub fn validate(&self) -> Result<()> {
        if self.f_x == 0 || self.f_y == 0 || self.f_t == 0 {
            return Err(Error::InvalidParam("perlin frequencies must be positive".into()));
        }
        Ok(())
    }

    /// All labels on the default grid, in a fixed class order.
    pub fn grid() -> Vec<PerlinLabel> {
        let mut out = Vec::with_capacity(64);
        for &f_t in &FREQUENCY_GRID {
            for &f_y in &FREQUENCY_GRID {
                for &f_x in &FREQUENCY_GRID {
                    out.push(PerlinLabel { f_x, f_y, f_t });
                }
            }
        }
        out
    }
}

/// Pseudorandom unit gradient at an integer lattice point. Spatial axes wrap
/// at their frequency so frames tile seamlessly.
fn lattice_gradient(seed: u64, ix: i64, iy: i64, it: i64) -> [f64; 3] {
    let mut s = seed
        ^ (ix as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (it as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
    // two uniforms -> point on the unit sphere
    let u1 = (splitmix64(&mut s) >> 11) as f64 / (1u64 << 53) as f64;
    let u2 = (splitmix64(&mut s) >> 11) as f64 / (1u64 << 53) as f64;
    let z = 2.0 * u1 - 1.0;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    [r * phi.cos(), r * phi.sin(), z]
}

fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

/// Raw gradient noise at (u, v, s); zero whenever all coordinates are
/// integers. Spatial lattice wraps with periods (px, py); the temporal
/// lattice wraps with period 1, so the signal is exactly periodic in s and
/// doubling f_t replays it at exactly twice the speed.
pub fn noise3(seed: u64, u: f64, v: f64, s: f64, px: u32, py: u32) -> f64 {
    let (x0, y0, t0) = (u.floor(), v.floor(), s.floor());
    let (fx, fy, ft) = (u - x0, v - y0, s - t0);
    let (wx, wy, wt) = (fade(fx), fade(fy), fade(ft));
    let wrap = |i: i64, p: u32| i.rem_euclid(p as i64);
    let mut corners = [0.0f64; 8];
    for (idx, corner) in corners.iter_mut().enumerate() {
        let (cx, cy, ct) =
            ((idx & 1) as i64, ((idx >> 1) & 1) as i64, ((idx >> 2) & 1) as i64);
        let g = lattice_gradient(
            seed,
            wrap(x0 as i64 + cx, px),
            wrap(y0 as i64 + cy, py),
            wrap(t0 as i64 + ct, 1),
        );
        let d = [fx - cx as f64, fy - cy as f64, ft - ct as f64];
        *corner = g[0] * d[0] + g[1] * d[1] + g[2] * d[2];
    }
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let x00 = lerp(corners[0], corners[1], wx);
    let x10 = lerp(corners[2], corners[3], wx);
    let x01 = lerp(corners[4], corners[5], wx);
    let x11 = lerp(corners[6], corners[7], wx);
    lerp(lerp(x00, x10, wy), lerp(x01, x11, wy), wt)
}

/// Maximum possible |noise3| for the rescale to [0, 1].
const NOISE_BOUND: f64 = 0.866_025_403_784_438_7; // sqrt(3)/2

pub fn perlin_clip(label: &PerlinLabel, t: usize, h: usize, w: usize, seed: u64) -> Result<Clip> {
    label.validate()?;
    let mut clip = Clip::zeros(t, h, w);
    for ti in 0..t {
        let s = ti as f64 * label.f_t as f64 / t as f64;
        let frame = clip.frame_mut(ti);
        for y in 0..h {
            let v = y as f64 * label.f_y as f64 / h as f64;
            for x in 0..w {
                let u = x as f64 * label.f_x as f64 / w as f64;
                let raw = noise3(seed, u, v, s, label.f_x, label.f_y);
                frame[y * w + x] =
                    ((raw / NOISE_BOUND) as f32 * 0.5 + 0.5).clamp(0.0, 1.0);
            }
        }
    }
    Ok(clip)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points_are_midgray() {
        // raw gradient noise vanishes on the integer lattice, so after the
        // affine rescale those samples read exactly 0.5
        for seed in [1u64, 7, 99] {
            for (u, v, s) in [(0.0, 0.0, 0.0), (1.0, 2.0, 3.0), (3.0, 1.0, 0.0)] {
                assert_eq!(noise3(seed, u, v, s, 4, 4), 0.0);
            }
        }
        let label = PerlinLabel { f_x: 4, f_y: 4, f_t: 4 };
        let clip = perlin_clip(&label, 4, 16, 16, 3).unwrap();
        // frame 0 has s = 0; pixels at x,y multiples of 4 hit the lattice
        for y in (0..16).step_by(4) {
            for x in (0..16).step_by(4) {
                assert!((clip.get(0, y, x) - 0.5).abs() < 1e-7, "({y},{x})");
            }
        }
    }

    #[test]
    fn output_in_unit_range() {
        for label in PerlinLabel::grid().iter().take(8) {
            let clip = perlin_clip(label, 6, 24, 24, 11).unwrap();
            assert!(clip.in_unit_range());
        }
    }

    #[test]
    fn deterministic_given_label_and_seed() {
        let label = PerlinLabel { f_x: 8, f_y: 2, f_t: 4 };
        let a = perlin_clip(&label, 5, 20, 20, 42).unwrap();
        let b = perlin_clip(&label, 5, 20, 20, 42).unwrap();
        assert_eq!(a.data(), b.data());
        let c = perlin_clip(&label, 5, 20, 20, 43).unwrap();
        assert!(a.max_abs_diff(&c) > 0.0);
    }

    #[test]
    fn labels_are_visually_distinct() {
        let a = perlin_clip(&PerlinLabel { f_x: 2, f_y: 2, f_t: 2 }, 4, 32, 32, 5).unwrap();
        let b = perlin_clip(&PerlinLabel { f_x: 16, f_y: 16, f_t: 2 }, 4, 32, 32, 5).unwrap();
        assert!(a.mean_abs_diff(&b) > 0.01);
    }

    fn zero_crossings(label: &PerlinLabel, t: usize, seed: u64) -> usize {
        // frame trace at a fixed off-lattice pixel; the spatial mean of a
        // full-period tile is numerically near zero, so a point probe gives
        // the cleaner temporal signal
        let clip = perlin_clip(label, t, 16, 16, seed).unwrap();
        let trace: Vec<f64> = (0..t).map(|ti| clip.get(ti, 3, 5) as f64 - 0.5).collect();
        trace.windows(2).filter(|p| p[0].signum() != p[1].signum()).count()
    }

    #[test]
    fn doubling_temporal_frequency_doubles_crossings() {
        // the temporal lattice wraps with period 1, so f_t = 2k replays the
        // f_t = k signal at exactly twice the speed
        let t = 512;
        for seed in [1u64, 2, 3, 4, 5] {
            let base = zero_crossings(&PerlinLabel { f_x: 2, f_y: 2, f_t: 2 }, t, seed);
            let double = zero_crossings(&PerlinLabel { f_x: 2, f_y: 2, f_t: 4 }, t, seed);
            assert!(
                (double as i64 - 2 * base as i64).abs() <= 1,
                "seed {seed}: base {base}, double {double}"
            );
        }
    }

    #[test]
    fn grid_has_64_distinct_labels() {
        let grid = PerlinLabel::grid();
        assert_eq!(grid.len(), 64);
        let mut seen = std::collections::HashSet::new();
        for l in &grid {
            assert!(seen.insert((l.f_x, l.f_y, l.f_t)));
        }
    }
}
