//! Alternative synthetic video families used for baseline comparisons:
//! Perlin noise, octopus curves, and dead leaves.

pub mod deadleaves;
pub mod morph;
pub mod octopus;
pub mod perlin;

pub use deadleaves::{deadleaves_clip, deadleaves_clip_seeded, sample_leaves, LeafSpec};
pub use octopus::{octopus_clip, octopus_clip_seeded, sample_octopus_spec, OctopusSpec};
pub use perlin::{perlin_clip, PerlinLabel};
