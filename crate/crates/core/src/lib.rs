//! Deterministic generator of labeled synthetic video datasets.
//!
//! The core pipeline samples 2D iterated function systems in decomposed
//! form, animates them by keyframe interpolation, renders them with the
//! chaos game, and post-processes the clips with motion-oriented transforms
//! (background mixing, displacement, zoom, shake, ...). Three alternative
//! generative families (gradient noise, conjoined curves, dead leaves) share
//! the same clip contract. Everything is reproducible from a single seed,
//! independent of worker count.

pub mod altgen;
pub mod augment;
pub mod clip;
pub mod error;
pub mod ifs;
pub mod motion;
pub mod par;
pub mod pipeline;
pub mod render;
pub mod rng;
pub mod taxonomy;
pub mod variations;

pub use clip::{Clip, Frame};
pub use error::{Error, Result};
