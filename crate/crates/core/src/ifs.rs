//! 2D iterated function systems in decomposed form.
//!
//! An affine map is stored either directly (matrix + translation) or as the
//! decomposition A = R_theta * Sigma * R_phi * D, where the R's are rotations,
//! Sigma holds the singular values and D is a reflection. Sampling in
//! decomposed form makes contractivity trivial to enforce: the Lipschitz
//! constant of the composed map is exactly sigma1.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One affine map `x -> A x + t` with `A = [[a, b], [d, e]]` and `t = (c, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
    pub c: f64,
    pub f: f64,
}

impl AffineMap {
    pub fn new(a: f64, b: f64, d: f64, e: f64, c: f64, f: f64) -> Self {
        Self { a, b, d, e, c, f }
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.b * y + self.c, self.d * x + self.e * y + self.f)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.e - self.b * self.d
    }

    /// Parameter row layout used throughout: [a, b, d, e, c, f].
    pub fn from_row(row: &[f64]) -> Self {
        Self::new(row[0], row[1], row[2], row[3], row[4], row[5])
    }

    pub fn to_row(&self) -> [f64; 6] {
        [self.a, self.b, self.d, self.e, self.c, self.f]
    }
}

/// Largest singular value of the 2x2 linear part.
///
/// Closed form via the E/F/G/H decomposition; exact up to rounding, no
/// iteration involved.
pub fn contraction_factor(map: &AffineMap) -> f64 {
    singular_values(map).0
}

/// Both singular values (sigma1 >= sigma2) of the 2x2 linear part.
pub fn singular_values(map: &AffineMap) -> (f64, f64) {
    let e = (map.a + map.e) / 2.0;
    let f = (map.a - map.e) / 2.0;
    let g = (map.d + map.b) / 2.0;
    let h = (map.d - map.b) / 2.0;
    let q = (e * e + h * h).sqrt();
    let r = (f * f + g * g).sqrt();
    (q + r, (q - r).abs())
}

/// One IFS function in decomposed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposedMap {
    pub theta: f64,
    pub phi: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub d1: f64,
    pub d2: f64,
    pub tx: f64,
    pub ty: f64,
}

/// Compose `R_theta * Sigma * R_phi * D` into a plain affine map.
///
/// The rotations and reflection are isometries, so the result's singular
/// values are exactly (sigma1, sigma2).
pub fn compose(map: &DecomposedMap) -> Result<AffineMap> {
    if map.sigma1 >= 1.0 {
        return Err(Error::NotContractive(map.sigma1));
    }
    let (st, ct) = map.theta.sin_cos();
    let (sp, cp) = map.phi.sin_cos();
    // M = Sigma * R_phi, columns then scaled by D.
    let m00 = map.sigma1 * cp * map.d1;
    let m01 = -map.sigma1 * sp * map.d2;
    let m10 = map.sigma2 * sp * map.d1;
    let m11 = map.sigma2 * cp * map.d2;
    Ok(AffineMap::new(
        ct * m00 - st * m10,
        ct * m01 - st * m11,
        st * m00 + ct * m10,
        st * m01 + ct * m11,
        map.tx,
        map.ty,
    ))
}

/// Selection probabilities `p_i = |det A_i| / sum_j |det A_j|`.
///
/// Falls back to uniform when every determinant is (numerically) zero so
/// the chaos game always progresses.
pub fn map_probabilities(maps: &[AffineMap]) -> Vec<f64> {
    let dets: Vec<f64> = maps.iter().map(|m| m.det().abs()).collect();
    let total: f64 = dets.iter().sum();
    if total < 1e-12 {
        vec![1.0 / maps.len() as f64; maps.len()]
    } else {
        dets.iter().map(|d| d / total).collect()
    }
}

pub fn sigma_bounds(n: usize) -> (f64, f64) {
    (0.5 * (5.0 + n as f64), 0.5 * (6.0 + n as f64))
}

pub fn sigma_sum(pairs: &[(f64, f64)]) -> f64 {
    pairs.iter().map(|(s1, s2)| s1 + 2.0 * s2).sum()
}

const SIGMA_CAP: f64 = 0.999;

/// Sample N singular-value pairs whose sum `a = sum(sigma1 + 2 sigma2)`
/// lands inside `[ (5+N)/2, (6+N)/2 ]`.
///
/// Draws sigma1 ~ U(0,1), sigma2 ~ U(0, sigma1), then rescales all values
/// toward the nearest bound until the interval is hit. Rescaling preserves
/// relative magnitudes and the sigma1 >= sigma2 ordering; the cap below 1
/// keeps every map contractive. If 1000 adjustment rounds fail, the whole
/// set is resampled.
pub fn sample_constrained_sigmas<R: Rng>(n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    assert!(n >= 2, "need at least 2 maps");
    let (lo, hi) = sigma_bounds(n);
    loop {
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let s1: f64 = rng.random_range(0.0..1.0);
                let s2: f64 = rng.random_range(0.0..=s1);
                (s1, s2)
            })
            .collect();
        for _ in 0..1000 {
            let a = sigma_sum(&pairs);
            if a >= lo && a <= hi && pairs.iter().all(|p| p.0 < 1.0) {
                return pairs;
            }
            if a <= 0.0 {
                break;
            }
            let target = if a < lo { lo } else { hi };
            let ratio = target / a;
            for p in &mut pairs {
                p.0 = (p.0 * ratio).min(SIGMA_CAP);
                p.1 = (p.1 * ratio).min(p.0);
            }
        }
    }
}

/// An ordered set of contractive maps plus selection probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl IfsSystem {
    /// Build a system from maps; probabilities follow the |det| rule and
    /// maps are sorted by descending probability (ties keep input order).
    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "an IFS needs N > 1 maps, got {}",
                maps.len()
            )));
        }
        let probs = map_probabilities(&maps);
        let mut order: Vec<usize> = (0..maps.len()).collect();
        order.sort_by(|&i, &j| probs[j].partial_cmp(&probs[i]).unwrap().then(i.cmp(&j)));
        let maps: Vec<AffineMap> = order.iter().map(|&i| maps[i]).collect();
        let probs: Vec<f64> = order.iter().map(|&i| probs[i]).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self { maps, probs, cdf })
    }

    pub fn from_rows(rows: &[[f64; 6]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| AffineMap::from_row(r)).collect())
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// True when every map is a contraction.
    pub fn is_contractive(&self) -> bool {
        self.maps.iter().all(|m| contraction_factor(m) < 1.0)
    }

    #[inline]
    pub fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random_range(0.0..1.0);
        for (i, c) in self.cdf.iter().enumerate() {
            if u < *c {
                return i;
            }
        }
        self.maps.len() - 1
    }
}
