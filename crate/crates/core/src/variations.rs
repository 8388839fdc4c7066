//! Nonlinear point transforms applied after the affine map.
//!
//! Only the subset with distinct, well-defined contours is exposed:
//! swirl (4), bent (14), fisheye (16), popcorn (17), cosine (20),
//! eyefish (27) and cylinder (29). Id 0 is the identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ALLOWED_VARIATIONS: [u8; 8] = [0, 4, 14, 16, 17, 20, 27, 29];

/// Nonzero ids usable for the diversity modification.
pub const NONZERO_VARIATIONS: [u8; 7] = [4, 14, 16, 17, 20, 27, 29];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariationId(u8);

impl VariationId {
    pub const IDENTITY: VariationId = VariationId(0);

    pub fn new(id: u8) -> Result<Self> {
        if ALLOWED_VARIATIONS.contains(&id) {
            Ok(Self(id))
        } else {
            Err(Error::InvalidVariation(id))
        }
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl Default for VariationId {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Apply variation `id` to a point. `trans` is the translation (c, f) of the
/// affine map just applied; only popcorn (17) reads it.
#[inline]
pub fn apply_variation(p: (f64, f64), id: VariationId, trans: (f64, f64)) -> (f64, f64) {
    let (x, y) = p;
    match id.0 {
        0 => (x, y),
        4 => {
            // swirl
            let r2 = x * x + y * y;
            let (s, c) = r2.sin_cos();
            (x * s - y * c, x * c + y * s)
        }
        14 => {
            // bent
            (if x < 0.0 { 2.0 * x } else { x }, if y < 0.0 { y / 2.0 } else { y })
        }
        16 => {
            // fisheye: (2 / (r + 1)) * (y, x)
            let r = (x * x + y * y).sqrt();
            let k = 2.0 / (r + 1.0);
            (k * y, k * x)
        }
        17 => {
            // popcorn, coefficients from the map translation
            (x + trans.0 * (3.0 * y).tan().sin(), y + trans.1 * (3.0 * x).tan().sin())
        }
        20 => {
            // cosine
            let (spx, cpx) = (std::f64::consts::PI * x).sin_cos();
            (cpx * y.cosh(), -spx * y.sinh())
        }
        27 => {
            // eyefish: (2 / (r + 1)) * (x, y)
            let r = (x * x + y * y).sqrt();
            let k = 2.0 / (r + 1.0);
            (k * x, k * y)
        }
        29 => (x.sin(), y),
        _ => unreachable!("VariationId is validated on construction"),
    }
}
