//! Dead-leaves clips: a canvas of geometric shapes painted back to front in
//! a fixed z-order, each shape traversing its own 2D trajectory curve.


use serde::{Deserialize, Serialize};

use super::morph::{stamp_shape, ShapeKind};
use crate::clip::Clip;
use crate::error::{Error, Result};
use crate::motion::RandomCurve;
use crate::rng::{seeded_rng, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafSpec {
    pub kind: ShapeKind,
    /// Shape size in pixels (circumradius).
    pub size_px: f64,
    pub gray: f64,
    /// Trajectory control points, normalized; evaluated with the quadratic
    /// curve interpolation used for random motion curves.
    pub traj_x: Vec<f64>,
    pub traj_y: Vec<f64>,
}

impl LeafSpec {
    pub fn validate(&self, h: usize, w: usize) -> Result<()> {
        if let ShapeKind::Polygon { k, .. } = self.kind {
            if !(3..=8).contains(&k) {
                return Err(Error::InvalidParam(format!("polygon edges {k} outside 3..8")));
            }
        }
        if self.size_px <= 0.0 || self.size_px > h.min(w) as f64 {
            return Err(Error::InvalidParam(format!("leaf size {} px does not fit", self.size_px)));
        }
        if !(0.0..=1.0).contains(&self.gray) {
            return Err(Error::InvalidParam("leaf gray outside [0,1]".into()));
        }
        if self.traj_x.len() < 3 || self.traj_y.len() < 3 {
            return Err(Error::InvalidParam("trajectory needs >= 3 control points".into()));
        }
        Ok(())
    }

    /// Center in pixels (y, x) at clip position u in [0, 1].
    pub fn center_at(&self, u: f64, h: usize, w: usize) -> (f64, f64) {
        let x = RandomCurve { values: self.traj_x.clone() }.eval(u);
        let y = RandomCurve { values: self.traj_y.clone() }.eval(u);
        (y.clamp(0.0, 1.0) * (h - 1) as f64, x.clamp(0.0, 1.0) * (w - 1) as f64)
    }
}

pub fn sample_leaves<R: rand::Rng>(h: usize, w: usize, rng: &mut R) -> Vec<LeafSpec> {
    let count = rng.random_range(5..=15usize);
    (0..count)
        .map(|_| {
            let m = rng.random_range(4..=8usize);
            LeafSpec {
                kind: if rng.random_bool(0.5) {
                    ShapeKind::Circle
                } else {
                    ShapeKind::Polygon {
                        k: rng.random_range(3..=8),
                        angle_rad: rng.random_range(0.0..std::f64::consts::TAU),
                    }
                },
                size_px: rng.random_range(0.05..0.2) * h.min(w) as f64,
                gray: rng.random_range(0.1..1.0),
                traj_x: (0..m).map(|_| rng.random_range(0.0..1.0)).collect(),
                traj_y: (0..m).map(|_| rng.random_range(0.0..1.0)).collect(),
            }
        })
        .collect()
}

pub fn deadleaves_clip(leaves: &[LeafSpec], t: usize, h: usize, w: usize) -> Result<Clip> {
    if leaves.is_empty() {
        return Err(Error::InvalidParam("dead leaves needs at least one leaf".into()));
    }
    for leaf in leaves {
        leaf.validate(h, w)?;
    }
    let mut clip = Clip::zeros(t, h, w);
    for ti in 0..t {
        let u = if t == 1 { 0.0 } else { ti as f64 / (t - 1) as f64 };
        let frame = clip.frame_mut(ti);
        for leaf in leaves {
            let (cy, cx) = leaf.center_at(u, h, w);
            stamp_shape(frame, h, w, &leaf.kind, cy, cx, leaf.size_px, leaf.gray as f32);
        }
    }
    Ok(clip)
}

pub fn deadleaves_clip_seeded(seed: u64, t: usize, h: usize, w: usize) -> Result<Clip> {
    let mut rng: Rng = seeded_rng(seed);
    deadleaves_clip(&sample_leaves(h, w, &mut rng), t, h, w)
}
