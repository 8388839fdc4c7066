//! Automatic category construction: frozen prototypes plus mutation.
//!
//! A category is a frozen parameter tensor W_c and a variation index. New
//! instances of the class perturb W_c with a time-varying scale curve and a
//! per-function bias: W~ = (1 + m_a) * W_c + m_b. The scale is read
//! multiplicatively around 1 so the perturbation stays mild and class
//! identity survives; the raw-scale reading would flip signs and collapse
//! parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ifs::{contraction_factor, singular_values, AffineMap};
use crate::motion::{
    assign_interpolants, interpolate_keyframes, sample_keyframes, ClipParams, RandomCurve,
    FRAME_RANGE, FUNC_RANGE,
};
use crate::rng::{derive_seed, seeded_rng};
use crate::variations::{VariationId, NONZERO_VARIATIONS};

pub const SCALE_BOUND: f64 = 0.35;
pub const BIAS_BOUND: f64 = 0.2;

/// Frozen parameters defining one synthetic category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPrototype {
    pub class_id: u32,
    pub seed: u64,
    pub params: ClipParams,
}

/// Per-class perturbation: `scale` varies over time but is shared across
/// functions (T x 1 x 6); `bias` varies over functions but is constant over
/// time (1 x N x 6).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationNoise {
    pub t: usize,
    pub n: usize,
    /// T x 6, each value in [-SCALE_BOUND, SCALE_BOUND]
    pub scale: Vec<f64>,
    /// N x 6, each value in [-BIAS_BOUND, BIAS_BOUND]
    pub bias: Vec<f64>,
}

impl MutationNoise {
    pub fn zeros(t: usize, n: usize) -> Self {
        Self { t, n, scale: vec![0.0; t * 6], bias: vec![0.0; n * 6] }
    }

    pub fn in_bounds(&self) -> bool {
        self.scale.iter().all(|v| v.abs() <= SCALE_BOUND)
            && self.bias.iter().all(|v| v.abs() <= BIAS_BOUND)
    }
}

/// Sample mutation noise: six random curves over time (same sampler as the
/// random motion interpolant) rescaled into the scale bounds, plus a uniform
/// per-function bias.
pub fn sample_mutation_noise<R: Rng>(t: usize, n: usize, rng: &mut R) -> MutationNoise {
    let curves: Vec<RandomCurve> = (0..6).map(|_| RandomCurve::sample(rng)).collect();
    let mut scale = vec![0.0; t * 6];
    for (ti, row) in scale.chunks_mut(6).enumerate() {
        let u = if t == 1 { 0.0 } else { ti as f64 / (t - 1) as f64 };
        for (k, slot) in row.iter_mut().enumerate() {
            // curve values live in [0,1] up to quadratic overshoot; map the
            // unit interval onto [-bound, bound] and clamp the overshoot
            let v = curves[k].eval(u).clamp(0.0, 1.0);
            *slot = (v - 0.5) * 2.0 * SCALE_BOUND;
        }
    }
    let bias = (0..n * 6).map(|_| rng.random_range(-BIAS_BOUND..BIAS_BOUND)).collect();
    MutationNoise { t, n, scale, bias }
}

/// Apply the mutation formula without any contractivity repair.
pub fn mutate_with(proto: &ClipParams, noise: &MutationNoise) -> ClipParams {
    assert_eq!((noise.t, noise.n), (proto.frames(), proto.funcs()));
    let (t, n) = (proto.frames(), proto.funcs());
    let mut w = vec![0.0; t * n * 6];
    for ti in 0..t {
        for ni in 0..n {
            let row = proto.row(ti, ni);
            let base = (ti * n + ni) * 6;
            for k in 0..6 {
                w[base + k] =
                    (1.0 + noise.scale[ti * 6 + k]) * row[k] + noise.bias[ni * 6 + k];
            }
        }
    }
    ClipParams::from_tensor(t, n, w, proto.variation)
}

const REPAIR_ATTEMPTS: usize = 100;
const REPAIR_SIGMA: f64 = 0.99;

/// Shrink a map's linear part so its largest singular value becomes
/// REPAIR_SIGMA.
fn shrink_row(row: &mut [f64]) {
    let map = AffineMap::from_row(row);
    let (s1, _) = singular_values(&map);
    if s1 >= 1.0 {
        let k = REPAIR_SIGMA / s1;
        for v in row.iter_mut().take(4) {
            *v *= k;
        }
    }
}

/// Sample noise, apply the mutation, and repair non-contractive frames by
/// redrawing that frame's scale row (up to 100 attempts), falling back to a
/// direct singular-value shrink.
pub fn mutate<R: Rng>(proto: &ClipParams, rng: &mut R) -> ClipParams {
    let (t, n) = (proto.frames(), proto.funcs());
    let mut noise = sample_mutation_noise(t, n, rng);
    let mut out = mutate_with(proto, &noise);
    let frame_ok = |p: &ClipParams, ti: usize| {
        p.frame_maps(ti).iter().all(|m| contraction_factor(m) < 1.0)
    };
    for ti in 0..t {
        let mut attempts = 0;
        while !frame_ok(&out, ti) && attempts < REPAIR_ATTEMPTS {
            for k in 0..6 {
                noise.scale[ti * 6 + k] = rng.random_range(-SCALE_BOUND..SCALE_BOUND);
            }
            out = mutate_with(proto, &noise);
            attempts += 1;
        }
    }
    // shrink last: rebuilding from noise above would undo in-place repairs
    for ti in 0..t {
        if !frame_ok(&out, ti) {
            for ni in 0..n {
                let base = (ti * n + ni) * 6;
                shrink_row(&mut out.tensor_mut()[base..base + 6]);
            }
        }
    }
    out
}

/// Sample C class prototypes. Prototypes use nonlinear motion; half of them
/// receive a nonzero flame variation.
pub fn sample_prototypes(count: usize, master_seed: u64) -> Vec<ClassPrototype> {
    (0..count)
        .map(|c| prototype_from_seed(c as u32, derive_seed(master_seed, c as u64)))
        .collect()
}

/// Build one prototype from an explicit seed (the unit sample_prototypes is
/// made of; also used to redraw a prototype under a different seed).
pub fn prototype_from_seed(class_id: u32, seed: u64) -> ClassPrototype {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(FUNC_RANGE);
    let t = rng.random_range(FRAME_RANGE);
    let funcs = sample_keyframes(n, &mut rng);
    let interps = assign_interpolants(n, &mut rng);
    let variation = if rng.random_bool(0.5) {
        let idx = rng.random_range(0..NONZERO_VARIATIONS.len());
        VariationId::new(NONZERO_VARIATIONS[idx]).unwrap()
    } else {
        VariationId::IDENTITY
    };
    let params = interpolate_keyframes(&funcs, t, &interps, variation);
    ClassPrototype { class_id, seed, params }
}
