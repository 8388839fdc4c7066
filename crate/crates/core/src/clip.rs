//! Grayscale pixel volumes shared by every generator and transform.

use serde::{Deserialize, Serialize};

/// One grayscale frame with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f32>,
}

impl Frame {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, values: vec![0.0; width * height] }
    }

    pub fn max_value(&self) -> f32 {
        self.values.iter().copied().fold(0.0, f32::max)
    }

    /// Fraction of pixels with a nonzero value.
    pub fn occupancy(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let lit = self.values.iter().filter(|v| **v > 0.0).count();
        lit as f64 / self.values.len() as f64
    }
}

/// A T x H x W volume of grayscale frames, stored contiguously.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clip {
    t: usize,
    h: usize,
    w: usize,
    data: Vec<f32>,
    pub degenerate: bool,
}

impl Clip {
    pub fn zeros(t: usize, h: usize, w: usize) -> Self {
        Self { t, h, w, data: vec![0.0; t * h * w], degenerate: false }
    }

    pub fn from_frames(frames: Vec<Frame>) -> Self {
        assert!(!frames.is_empty());
        let (w, h) = (frames[0].width, frames[0].height);
        let mut data = Vec::with_capacity(frames.len() * w * h);
        for f in &frames {
            assert_eq!((f.width, f.height), (w, h), "frames must share dimensions");
            data.extend_from_slice(&f.values);
        }
        Self { t: frames.len(), h, w, data, degenerate: false }
    }

    pub fn len(&self) -> usize {
        self.t
    }

    pub fn is_empty(&self) -> bool {
        self.t == 0
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn frame(&self, t: usize) -> &[f32] {
        &self.data[t * self.h * self.w..(t + 1) * self.h * self.w]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [f32] {
        &mut self.data[t * self.h * self.w..(t + 1) * self.h * self.w]
    }

    #[inline]
    pub fn get(&self, t: usize, y: usize, x: usize) -> f32 {
        self.data[(t * self.h + y) * self.w + x]
    }

    #[inline]
    pub fn set(&mut self, t: usize, y: usize, x: usize, v: f32) {
        self.data[(t * self.h + y) * self.w + x] = v;
    }

    pub fn frame_occupancy(&self, t: usize) -> f64 {
        let frame = self.frame(t);
        let lit = frame.iter().filter(|v| **v > 0.0).count();
        lit as f64 / frame.len() as f64
    }

    pub fn occupancies(&self) -> Vec<f64> {
        (0..self.t).map(|t| self.frame_occupancy(t)).collect()
    }

    /// Largest absolute per-pixel difference against another clip.
    pub fn max_abs_diff(&self, other: &Clip) -> f32 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }

    pub fn mean_abs_diff(&self, other: &Clip) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs() as f64)
            .sum();
        sum / self.data.len() as f64
    }

    pub fn in_unit_range(&self) -> bool {
        self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }
}
