//! Clip storage: directories of 8-bit grayscale PNG frames, plus a raw
//! single-file format ("FVID") that skips decode overhead.

use std::io::{Read, Write};
use std::path::Path;

use image::{GrayImage, ImageFormat, Luma};

use crate::clip::Clip;
use crate::error::{Error, Result};

pub const FVID_MAGIC: &[u8; 4] = b"FVID";

#[inline]
pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn frame_bytes(clip: &Clip, t: usize) -> Vec<u8> {
    clip.frame(t).iter().map(|v| quantize(*v)).collect()
}

fn frame_image(clip: &Clip, t: usize) -> GrayImage {
    GrayImage::from_raw(clip.width() as u32, clip.height() as u32, frame_bytes(clip, t))
        .expect("frame buffer size")
}

/// Write `frame_000.png`, `frame_001.png`, ... into `dir`.
pub fn write_png_frames(dir: &Path, clip: &Clip) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in 0..clip.len() {
        frame_image(clip, t).save_with_format(dir.join(format!("frame_{t:03}.png")), ImageFormat::Png)?;
    }
    Ok(())
}

pub fn read_png_frames(dir: &Path) -> Result<Clip> {
    let mut frames = Vec::new();
    for t in 0.. {
        let path = dir.join(format!("frame_{t:03}.png"));
        if !path.exists() {
            break;
        }
        let img = image::open(&path)?.into_luma8();
        frames.push(img);
    }
    if frames.is_empty() {
        return Err(Error::MissingFile(dir.join("frame_000.png")));
    }
    let (w, h) = (frames[0].width() as usize, frames[0].height() as usize);
    let mut clip = Clip::zeros(frames.len(), h, w);
    for (t, img) in frames.iter().enumerate() {
        for (dst, src) in clip.frame_mut(t).iter_mut().zip(img.as_raw()) {
            *dst = *src as f32 / 255.0;
        }
    }
    Ok(clip)
}

/// Raw format: magic "FVID", then T, H, W as little-endian u16, then
/// T*H*W row-major u8 samples.
pub fn write_fvid(path: &Path, clip: &Clip) -> Result<()> {
    let (t, h, w) = (clip.len(), clip.height(), clip.width());
    if t > u16::MAX as usize || h > u16::MAX as usize || w > u16::MAX as usize {
        return Err(Error::InvalidParam("clip dimensions exceed the FVID u16 header".into()));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(FVID_MAGIC)?;
    for dim in [t as u16, h as u16, w as u16] {
        file.write_all(&dim.to_le_bytes())?;
    }
    let payload: Vec<u8> = clip.data().iter().map(|v| quantize(*v)).collect();
    file.write_all(&payload)?;
    Ok(())
}

pub fn read_fvid(path: &Path) -> Result<Clip> {
    let mut file =
        std::fs::File::open(path).map_err(|_| Error::MissingFile(path.to_path_buf()))?;
    let mut header = [0u8; 10];
    file.read_exact(&mut header)?;
    if &header[..4] != FVID_MAGIC {
        return Err(Error::InvalidParam(format!("{} is not an FVID file", path.display())));
    }
    let dim = |i: usize| u16::from_le_bytes([header[4 + 2 * i], header[5 + 2 * i]]) as usize;
    let (t, h, w) = (dim(0), dim(1), dim(2));
    let mut payload = vec![0u8; t * h * w];
    file.read_exact(&mut payload)?;
    let mut clip = Clip::zeros(t, h, w);
    for (dst, src) in clip.data_mut().iter_mut().zip(&payload) {
        *dst = *src as f32 / 255.0;
    }
    Ok(clip)
}

/// Horizontal strip of every `stride`-th frame, for quick visual inspection.
pub fn preview_strip(clip: &Clip, stride: usize) -> GrayImage {
    let stride = stride.max(1);
    let panels = clip.len().div_ceil(stride);
    let (h, w) = (clip.height(), clip.width());
    let mut img = GrayImage::new((w * panels) as u32, h as u32);
    for (panel, t) in (0..clip.len()).step_by(stride).enumerate() {
        let frame = clip.frame(t);
        for y in 0..h {
            for x in 0..w {
                img.put_pixel(
                    (panel * w + x) as u32,
                    y as u32,
                    Luma([quantize(frame[y * w + x])]),
                );
            }
        }
    }
    img
}

/// FNV-1a over the quantized payload; used to compare datasets across runs.
pub fn clip_checksum(clip: &Clip) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for v in clip.data() {
        hash ^= quantize(*v) as u64;
        hash = hash.wrapping_mul(0x1000_0000_01B3);
    }
    hash
}
