//! Frame-level raster kernels: bilinear resize, crops, rotation, homography.
//!
//! All kernels treat out-of-source samples as zero and keep values in [0, 1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub y: usize,
    pub x: usize,
    pub h: usize,
    pub w: usize,
}

#[inline]
pub fn bilinear_sample(src: &[f32], h: usize, w: usize, fy: f64, fx: f64) -> f32 {
    if fx <= -1.0 || fy <= -1.0 || fx >= w as f64 || fy >= h as f64 {
        return 0.0;
    }
    let x0 = fx.floor();
    let y0 = fy.floor();
    let tx = (fx - x0) as f32;
    let ty = (fy - y0) as f32;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let at = |y: i64, x: i64| -> f32 {
        if y < 0 || x < 0 || y >= h as i64 || x >= w as i64 {
            0.0
        } else {
            src[y as usize * w + x as usize]
        }
    };
    let top = at(y0, x0) * (1.0 - tx) + at(y0, x0 + 1) * tx;
    let bot = at(y0 + 1, x0) * (1.0 - tx) + at(y0 + 1, x0 + 1) * tx;
    top * (1.0 - ty) + bot * ty
}

/// Bilinear resize; same-size calls are an exact copy.
pub fn resize_bilinear(src: &[f32], h: usize, w: usize, oh: usize, ow: usize) -> Vec<f32> {
    if (oh, ow) == (h, w) {
        return src.to_vec();
    }
    let mut out = vec![0.0f32; oh * ow];
    let sy = h as f64 / oh as f64;
    let sx = w as f64 / ow as f64;
    for y in 0..oh {
        let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (h - 1) as f64);
        for x in 0..ow {
            let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (w - 1) as f64);
            out[y * ow + x] = bilinear_sample(src, h, w, fy, fx);
        }
    }
    out
}

pub fn crop(src: &[f32], w: usize, rect: &Rect) -> Vec<f32> {
    let mut out = Vec::with_capacity(rect.h * rect.w);
    for y in rect.y..rect.y + rect.h {
        out.extend_from_slice(&src[y * w + rect.x..y * w + rect.x + rect.w]);
    }
    out
}

pub fn crop_resize(
    src: &[f32],
    h: usize,
    w: usize,
    rect: &Rect,
    oh: usize,
    ow: usize,
) -> Vec<f32> {
    debug_assert!(rect.y + rect.h <= h && rect.x + rect.w <= w);
    let cropped = crop(src, w, rect);
    resize_bilinear(&cropped, rect.h, rect.w, oh, ow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composite {
    Overwrite,
    Max,
}

/// Paste `src` onto `dst` at (y0, x0), clipping at the borders.
pub fn paste(
    dst: &mut [f32],
    dh: usize,
    dw: usize,
    src: &[f32],
    sh: usize,
    sw: usize,
    y0: i64,
    x0: i64,
    mode: Composite,
) {
    for sy in 0..sh {
        let dy = y0 + sy as i64;
        if dy < 0 || dy >= dh as i64 {
            continue;
        }
        for sx in 0..sw {
            let dx = x0 + sx as i64;
            if dx < 0 || dx >= dw as i64 {
                continue;
            }
            let d = &mut dst[dy as usize * dw + dx as usize];
            let s = src[sy * sw + sx];
            match mode {
                Composite::Overwrite => *d = s,
                Composite::Max => *d = d.max(s),
            }
        }
    }
}

pub fn hflip(src: &[f32], h: usize, w: usize) -> Vec<f32> {
    let mut out = vec![0.0f32; h * w];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = src[y * w + (w - 1 - x)];
        }
    }
    out
}

/// Rotate around the frame center; out-of-source samples are zero.
pub fn rotate_bilinear(src: &[f32], h: usize, w: usize, angle_rad: f64) -> Vec<f32> {
    if angle_rad == 0.0 {
        return src.to_vec();
    }
    let (s, c) = angle_rad.sin_cos();
    let cy = (h as f64 - 1.0) / 2.0;
    let cx = (w as f64 - 1.0) / 2.0;
    let mut out = vec![0.0f32; h * w];
    for y in 0..h {
        for x in 0..w {
            let dy = y as f64 - cy;
            let dx = x as f64 - cx;
            // inverse rotation
            let fx = c * dx + s * dy + cx;
            let fy = -s * dx + c * dy + cy;
            out[y * w + x] = bilinear_sample(src, h, w, fy, fx);
        }
    }
    out
}

/// 3x3 projective transform, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homography(pub [f64; 9]);

impl Homography {
    pub fn identity() -> Self {
        Self([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let m = &self.0;
        let d = m[6] * x + m[7] * y + m[8];
        ((m[0] * x + m[1] * y + m[2]) / d, (m[3] * x + m[4] * y + m[5]) / d)
    }

    /// Solve for H mapping each `from[i]` to `to[i]` (four correspondences,
    /// standard DLT with h22 = 1).
    pub fn from_corners(from: &[[f64; 2]; 4], to: &[[f64; 2]; 4]) -> Result<Self> {
        let mut a = [[0.0f64; 9]; 8];
        for i in 0..4 {
            let (x, y) = (from[i][0], from[i][1]);
            let (u, v) = (to[i][0], to[i][1]);
            a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, u];
            a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, v];
        }
        // gaussian elimination with partial pivoting on the 8x9 system
        for col in 0..8 {
            let pivot = (col..8)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            if a[pivot][col].abs() < 1e-12 {
                return Err(Error::InvalidParam("degenerate corner set".into()));
            }
            a.swap(col, pivot);
            let inv = 1.0 / a[col][col];
            for k in col..9 {
                a[col][k] *= inv;
            }
            for row in 0..8 {
                if row != col {
                    let f = a[row][col];
                    if f != 0.0 {
                        for k in col..9 {
                            a[row][k] -= f * a[col][k];
                        }
                    }
                }
            }
        }
        let mut h = [0.0f64; 9];
        for i in 0..8 {
            h[i] = a[i][8];
        }
        h[8] = 1.0;
        Ok(Self(h))
    }
}

/// Warp one frame: each output pixel samples the source at H(x, y).
pub fn warp_frame(src: &[f32], h: usize, w: usize, hom: &Homography) -> Vec<f32> {
    let mut out = vec![0.0f32; h * w];
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = hom.apply(x as f64, y as f64);
            out[y * w + x] = bilinear_sample(src, h, w, fy, fx);
        }
    }
    out
}
