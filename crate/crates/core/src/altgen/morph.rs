//! Binary morphology, separable Gaussian blur, and simple shape
//! rasterization shared by the alternative generators.

/// Disk structuring element: offsets with dy^2 + dx^2 <= r^2.
pub fn disk_offsets(radius: usize) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dy * dy + dx * dx <= r * r {
                out.push((dy, dx));
            }
        }
    }
    out
}

/// Dilation of a binary mask; pixels outside the frame count as 0.
pub fn dilate(mask: &[bool], h: usize, w: usize, radius: usize) -> Vec<bool> {
    let offs = disk_offsets(radius);
    let mut out = vec![false; h * w];
    for y in 0..h {
        for x in 0..w {
            if !mask[y * w + x] {
                continue;
            }
            for &(dy, dx) in &offs {
                let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                if ny >= 0 && nx >= 0 && (ny as usize) < h && (nx as usize) < w {
                    out[ny as usize * w + nx as usize] = true;
                }
            }
        }
    }
    out
}

/// Erosion of a binary mask; pixels outside the frame count as 1, which
/// keeps closing extensive at the borders.
pub fn erode(mask: &[bool], h: usize, w: usize, radius: usize) -> Vec<bool> {
    let offs = disk_offsets(radius);
    let mut out = vec![false; h * w];
    for y in 0..h {
        'pixel: for x in 0..w {
            for &(dy, dx) in &offs {
                let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                if ny >= 0 && nx >= 0 && (ny as usize) < h && (nx as usize) < w {
                    if !mask[ny as usize * w + nx as usize] {
                        continue 'pixel;
                    }
                }
            }
            out[y * w + x] = true;
        }
    }
    out
}

pub fn closing(mask: &[bool], h: usize, w: usize, radius: usize) -> Vec<bool> {
    erode(&dilate(mask, h, w, radius), h, w, radius)
}

/// Morphological gradient: dilation minus erosion — the shape outline.
pub fn gradient(mask: &[bool], h: usize, w: usize, radius: usize) -> Vec<bool> {
    let d = dilate(mask, h, w, radius);
    let e = erode(mask, h, w, radius);
    d.iter().zip(&e).map(|(a, b)| *a && !b).collect()
}

/// Separable Gaussian blur with kernel radius ceil(3 sigma); the border is
/// renormalized so flat regions stay flat.
pub fn gaussian_blur(frame: &[f32], h: usize, w: usize, sigma: f64) -> Vec<f32> {
    if sigma <= 0.0 {
        return frame.to_vec();
    }
    let r = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> =
        (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let pass = |src: &[f32], len: usize, stride: usize, lanes: usize, lane_stride: usize| {
        let mut dst = vec![0.0f32; src.len()];
        for lane in 0..lanes {
            let base = lane * lane_stride;
            for i in 0..len {
                let (mut acc, mut norm) = (0.0f64, 0.0f64);
                for (ki, kv) in kernel.iter().enumerate() {
                    let j = i as i64 + ki as i64 - r;
                    if j >= 0 && (j as usize) < len {
                        acc += kv * src[base + j as usize * stride] as f64;
                        norm += kv;
                    }
                }
                dst[base + i * stride] = (acc / norm) as f32;
            }
        }
        dst
    };
    let horiz = pass(frame, w, 1, h, w);
    pass(&horiz, h, w, w, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    /// Regular polygon with k edges, k in 3..=8.
    Polygon { k: u8, angle_rad: f64 },
}

/// Stamp a filled shape of the given radius and gray level onto a frame
/// (painter's overwrite), clipping at the borders.
pub fn stamp_shape(
    frame: &mut [f32],
    h: usize,
    w: usize,
    kind: &ShapeKind,
    cy: f64,
    cx: f64,
    radius: f64,
    gray: f32,
) {
    let y0 = ((cy - radius).floor().max(0.0)) as usize;
    let y1 = ((cy + radius).ceil().min((h - 1) as f64)) as usize;
    let x0 = ((cx - radius).floor().max(0.0)) as usize;
    let x1 = ((cx + radius).ceil().min((w - 1) as f64)) as usize;
    match kind {
        ShapeKind::Circle => {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dy, dx) = (y as f64 - cy, x as f64 - cx);
                    if dy * dy + dx * dx <= radius * radius {
                        frame[y * w + x] = gray;
                    }
                }
            }
        }
        ShapeKind::Polygon { k, angle_rad } => {
            let k = (*k).clamp(3, 8) as usize;
            let verts: Vec<(f64, f64)> = (0..k)
                .map(|i| {
                    let a = angle_rad + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    (cy + radius * a.sin(), cx + radius * a.cos())
                })
                .collect();
            for y in y0..=y1 {
                for x in x0..=x1 {
                    // convex polygon: the point must lie on one side of
                    // every edge
                    let (py, px) = (y as f64, x as f64);
                    let inside = (0..k).all(|i| {
                        let (ay, ax) = verts[i];
                        let (by, bx) = verts[(i + 1) % k];
                        (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0.0
                    });
                    if inside {
                        frame[y * w + x] = gray;
                    }
                }
            }
        }
    }
}

/// Mark the pixels of the segment (y0,x0)-(y1,x1) in a binary mask using
/// dense parametric sampling.
pub fn draw_segment(mask: &mut [bool], h: usize, w: usize, a: (f64, f64), b: (f64, f64)) {
    let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1) * 2;
    for s in 0..=steps {
        let u = s as f64 / steps as f64;
        let y = (a.0 + (b.0 - a.0) * u).round() as i64;
        let x = (a.1 + (b.1 - a.1) * u).round() as i64;
        if y >= 0 && x >= 0 && (y as usize) < h && (x as usize) < w {
            mask[y as usize * w + x as usize] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_mask(h: usize, w: usize, cy: usize, cx: usize, r: usize) -> Vec<bool> {
        let mut mask = vec![false; h * w];
        for y in 0..h {
            for x in 0..w {
                let (dy, dx) = (y as i64 - cy as i64, x as i64 - cx as i64);
                mask[y * w + x] = dy * dy + dx * dx <= (r * r) as i64;
            }
        }
        mask
    }

    #[test]
    fn closing_is_extensive() {
        let mut mask = vec![false; 32 * 32];
        // two nearby dots plus a border pixel
        mask[10 * 32 + 10] = true;
        mask[10 * 32 + 13] = true;
        mask[0] = true;
        let closed = closing(&mask, 32, 32, 2);
        for (i, (m, c)) in mask.iter().zip(&closed).enumerate() {
            assert!(!m || *c, "closing dropped pixel {i}");
        }
    }

    #[test]
    fn closing_bridges_small_gap() {
        // two vertical strokes with a one-pixel gap column between them
        let mut mask = vec![false; 16 * 16];
        for y in 4..12 {
            mask[y * 16 + 5] = true;
            mask[y * 16 + 7] = true;
        }
        assert!(!mask[8 * 16 + 6]);
        let closed = closing(&mask, 16, 16, 1);
        assert!(closed[8 * 16 + 6], "gap column not bridged");
    }

    #[test]
    fn gradient_of_disk_is_annulus() {
        // reference check on a 21x21 disk: the center must not be on the
        // gradient, the boundary must be
        let mask = disk_mask(21, 21, 10, 10, 7);
        let g = gradient(&mask, 21, 21, 1);
        assert!(!g[10 * 21 + 10], "disk interior leaked into the gradient");
        assert!(g[10 * 21 + 17] || g[10 * 21 + 16], "disk rim missing from the gradient");
        // annulus area sanity: between one and three rings of the ideal
        // circumference 2 pi r
        let area = g.iter().filter(|v| **v).count() as f64;
        let circ = 2.0 * std::f64::consts::PI * 7.0;
        assert!(area > circ * 0.8 && area < circ * 3.5, "area {area}");
    }

    #[test]
    fn erode_then_dilate_shrinks() {
        let mask = disk_mask(21, 21, 10, 10, 6);
        let opened = dilate(&erode(&mask, 21, 21, 2), 21, 21, 2);
        for (m, o) in mask.iter().zip(&opened) {
            assert!(!o | m, "opening grew the mask");
        }
    }

    #[test]
    fn blur_preserves_flat_field() {
        let frame = vec![0.7f32; 16 * 16];
        let out = gaussian_blur(&frame, 16, 16, 1.5);
        for v in out {
            assert!((v - 0.7).abs() < 1e-5);
        }
    }

    #[test]
    fn blur_spreads_impulse_symmetrically() {
        let mut frame = vec![0.0f32; 17 * 17];
        frame[8 * 17 + 8] = 1.0;
        let out = gaussian_blur(&frame, 17, 17, 1.0);
        assert!(out[8 * 17 + 8] > out[8 * 17 + 9]);
        assert!((out[8 * 17 + 9] - out[8 * 17 + 7]).abs() < 1e-7);
        assert!((out[9 * 17 + 8] - out[7 * 17 + 8]).abs() < 1e-7);
        let total: f32 = out.iter().sum();
        assert!((total - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stamp_circle_centroid() {
        let mut frame = vec![0.0f32; 32 * 32];
        stamp_shape(&mut frame, 32, 32, &ShapeKind::Circle, 15.0, 12.0, 5.0, 1.0);
        let (mut sy, mut sx, mut n) = (0.0, 0.0, 0.0);
        for y in 0..32 {
            for x in 0..32 {
                if frame[y * 32 + x] > 0.0 {
                    sy += y as f64;
                    sx += x as f64;
                    n += 1.0;
                }
            }
        }
        assert!((sy / n - 15.0).abs() < 0.5 && (sx / n - 12.0).abs() < 0.5);
    }

    #[test]
    fn stamp_polygon_orientation_and_winding() {
        let mut frame = vec![0.0f32; 32 * 32];
        stamp_shape(
            &mut frame,
            32,
            32,
            &ShapeKind::Polygon { k: 4, angle_rad: 0.0 },
            16.0,
            16.0,
            8.0,
            1.0,
        );
        assert!(frame[16 * 32 + 16] > 0.0, "polygon interior empty");
        let area = frame.iter().filter(|v| **v > 0.0).count() as f64;
        // square with circumradius 8 has area 2 r^2 = 128
        assert!((area - 128.0).abs() < 20.0, "area {area}");
    }

    #[test]
    fn segment_endpoints_and_connectivity() {
        let mut mask = vec![false; 16 * 16];
        draw_segment(&mut mask, 16, 16, (2.0, 3.0), (12.0, 11.0));
        assert!(mask[2 * 16 + 3] && mask[12 * 16 + 11]);
        assert!(mask.iter().filter(|v| **v).count() >= 10);
    }
}
