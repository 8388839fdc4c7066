//! Animated clip parameters: keyframe sampling and interpolation.
//!
//! A clip is defined by two parameter keyframes per IFS function, blended
//! over T frames. Blending happens on the decomposed scalars (angles,
//! singular values, translation), never on composed matrices, so every
//! intermediate frame stays contractive. Each function can carry its own
//! interpolation curve to compose simple motions into a richer one.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ifs::{
    compose, contraction_factor, sample_constrained_sigmas, AffineMap, DecomposedMap, IfsSystem,
};
use crate::variations::VariationId;

pub const FRAME_RANGE: std::ops::RangeInclusive<usize> = 18..=20;
pub const FUNC_RANGE: std::ops::RangeInclusive<usize> = 3..=8;

/// A random waveform: control points at uniform abscissae, evaluated with
/// piecewise quadratic (three-point Lagrange) interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomCurve {
    pub values: Vec<f64>,
}

impl RandomCurve {
    /// m ~ U{4..8} control points with values ~ U(0, 1).
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        let m = rng.random_range(4..=8);
        Self { values: (0..m).map(|_| rng.random_range(0.0..1.0)).collect() }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let m = self.values.len();
        assert!(m >= 3, "need at least 3 control points");
        let u = u.clamp(0.0, 1.0);
        let step = 1.0 / (m - 1) as f64;
        let i = ((u / step) as usize).min(m - 2);
        let j = i.min(m - 3);
        // Lagrange quadratic through points j, j+1, j+2
        let (x0, x1, x2) = (j as f64 * step, (j + 1) as f64 * step, (j + 2) as f64 * step);
        let (y0, y1, y2) = (self.values[j], self.values[j + 1], self.values[j + 2]);
        y0 * ((u - x1) * (u - x2)) / ((x0 - x1) * (x0 - x2))
            + y1 * ((u - x0) * (u - x2)) / ((x1 - x0) * (x1 - x2))
            + y2 * ((u - x0) * (u - x1)) / ((x2 - x0) * (x2 - x1))
    }
}

/// A curve mapping normalized time u in [0, 1] to a blend weight in [0, 1].
///
/// All kinds evaluate to 0 at u = 0, so frame 0 always equals the start
/// keyframe. Nonlinear kinds need not reach 1 at u = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterpolantSpec {
    Linear,
    Sinusoidal { cycles: u32, noise: RandomCurve, noise_amp: f64 },
    Sharp { start: f64, width: f64 },
    Random { curve: RandomCurve },
}

pub fn eval_interpolant(spec: &InterpolantSpec, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    match spec {
        InterpolantSpec::Linear => u,
        InterpolantSpec::Sinusoidal { cycles, noise, noise_amp } => {
            let base = (1.0 - (2.0 * std::f64::consts::PI * *cycles as f64 * u).cos()) / 2.0;
            // anchor the noise at 0 so the curve starts exactly at the keyframe
            let n = noise_amp * (noise.eval(u) - noise.eval(0.0));
            (base + n).clamp(0.0, 1.0)
        }
        InterpolantSpec::Sharp { start, width } => {
            if u < *start {
                0.0
            } else if u > start + width {
                1.0
            } else {
                (u - start) / width
            }
        }
        InterpolantSpec::Random { curve } => (curve.eval(u) - curve.eval(0.0)).clamp(0.0, 1.0),
    }
}

pub fn sample_sinusoidal<R: Rng>(rng: &mut R) -> InterpolantSpec {
    InterpolantSpec::Sinusoidal {
        cycles: rng.random_range(1..=3),
        noise: RandomCurve::sample(rng),
        noise_amp: 0.1,
    }
}

pub fn sample_sharp<R: Rng>(rng: &mut R) -> InterpolantSpec {
    let width = rng.random_range(0.1..0.25);
    let start = rng.random_range(0.0..(1.0 - width));
    InterpolantSpec::Sharp { start, width }
}

pub fn sample_random_interp<R: Rng>(rng: &mut R) -> InterpolantSpec {
    InterpolantSpec::Random { curve: RandomCurve::sample(rng) }
}

/// The constrained interpolant set: linear plus one or two distinct
/// nonlinear kinds.
pub fn build_interpolant_set<R: Rng>(rng: &mut R) -> Vec<InterpolantSpec> {
    let mut kinds = [0u8, 1, 2];
    kinds.shuffle(rng);
    let extra = if rng.random_bool(0.5) { 1 } else { 2 };
    let mut set = vec![InterpolantSpec::Linear];
    for &k in kinds.iter().take(extra) {
        set.push(match k {
            0 => sample_sinusoidal(rng),
            1 => sample_sharp(rng),
            _ => sample_random_interp(rng),
        });
    }
    set
}

/// Assign one interpolant per IFS function pair: either a uniform draw from
/// the set per function, or a single set member shared by all (fair coin).
pub fn assign_interpolants<R: Rng>(n: usize, rng: &mut R) -> Vec<InterpolantSpec> {
    assert!(n >= 2);
    let set = build_interpolant_set(rng);
    if rng.random_bool(0.5) {
        (0..n).map(|_| set[rng.random_range(0..set.len())].clone()).collect()
    } else {
        let pick = set[rng.random_range(0..set.len())].clone();
        vec![pick; n]
    }
}

/// One decomposed parameter keyframe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposedKey {
    pub sigma1: f64,
    pub sigma2: f64,
    pub theta: f64,
    pub phi: f64,
    pub tx: f64,
    pub ty: f64,
}

/// Start/end keyframes plus the shared reflection for one IFS function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionKeyframes {
    pub start: DecomposedKey,
    pub end: DecomposedKey,
    pub d1: f64,
    pub d2: f64,
}

/// Everything needed to render one clip: a T x N x 6 parameter tensor plus
/// the variation index. Row layout is [a, b, d, e, tx, ty].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipParams {
    t: usize,
    n: usize,
    w: Vec<f64>,
    pub variation: VariationId,
}

impl ClipParams {
    pub fn from_tensor(t: usize, n: usize, w: Vec<f64>, variation: VariationId) -> Self {
        assert_eq!(w.len(), t * n * 6);
        Self { t, n, w, variation }
    }

    pub fn frames(&self) -> usize {
        self.t
    }

    pub fn funcs(&self) -> usize {
        self.n
    }

    pub fn tensor(&self) -> &[f64] {
        &self.w
    }

    pub fn tensor_mut(&mut self) -> &mut [f64] {
        &mut self.w
    }

    pub fn row(&self, t: usize, n: usize) -> &[f64] {
        let base = (t * self.n + n) * 6;
        &self.w[base..base + 6]
    }

    pub fn frame_maps(&self, t: usize) -> Vec<AffineMap> {
        (0..self.n).map(|n| AffineMap::from_row(self.row(t, n))).collect()
    }

    pub fn frame_system(&self, t: usize) -> Result<IfsSystem> {
        IfsSystem::new(self.frame_maps(t))
    }

    pub fn all_contractive(&self) -> bool {
        (0..self.t)
            .all(|t| self.frame_maps(t).iter().all(|m| contraction_factor(m) < 1.0))
    }

    /// Baseline for the density comparison: linear interpolation of the raw
    /// tensor entries between the first and last frame, same endpoints.
    pub fn flat_interpolated(&self) -> ClipParams {
        let mut w = vec![0.0; self.w.len()];
        let last = self.t - 1;
        for t in 0..self.t {
            let u = if last == 0 { 0.0 } else { t as f64 / last as f64 };
            for n in 0..self.n {
                let a = self.row(0, n);
                let b = self.row(last, n);
                let base = (t * self.n + n) * 6;
                for k in 0..6 {
                    w[base + k] = (1.0 - u) * a[k] + u * b[k];
                }
            }
        }
        ClipParams { t: self.t, n: self.n, w, variation: self.variation }
    }
}

fn compose_key(key: &DecomposedKey, d1: f64, d2: f64) -> AffineMap {
    compose(&DecomposedMap {
        theta: key.theta,
        phi: key.phi,
        sigma1: key.sigma1,
        sigma2: key.sigma2,
        d1,
        d2,
        tx: key.tx,
        ty: key.ty,
    })
    .expect("keyframes are contractive by construction")
}

/// Blend keyframes into a full parameter tensor. `interps[n]` drives the
/// blend weight of function n; scalars are blended individually and the
/// per-frame matrix is composed afterwards.
pub fn interpolate_keyframes(
    funcs: &[FunctionKeyframes],
    t_frames: usize,
    interps: &[InterpolantSpec],
    variation: VariationId,
) -> ClipParams {
    assert!(t_frames >= 1);
    assert_eq!(funcs.len(), interps.len());
    let n = funcs.len();
    let mut w = vec![0.0; t_frames * n * 6];
    for t in 0..t_frames {
        let u = if t_frames == 1 { 0.0 } else { t as f64 / (t_frames - 1) as f64 };
        for (i, func) in funcs.iter().enumerate() {
            let c = eval_interpolant(&interps[i], u);
            let lerp = |a: f64, b: f64| (1.0 - c) * a + c * b;
            let key = DecomposedKey {
                sigma1: lerp(func.start.sigma1, func.end.sigma1),
                sigma2: lerp(func.start.sigma2, func.end.sigma2),
                theta: lerp(func.start.theta, func.end.theta),
                phi: lerp(func.start.phi, func.end.phi),
                tx: lerp(func.start.tx, func.end.tx),
                ty: lerp(func.start.ty, func.end.ty),
            };
            let map = compose_key(&key, func.d1, func.d2);
            let base = (t * n + i) * 6;
            w[base..base + 6].copy_from_slice(&map.to_row());
        }
    }
    ClipParams { t: t_frames, n, w, variation }
}

/// Sample start/end keyframes for N functions. Both endpoint sets satisfy
/// the sigma-sum constraint; each set is sorted by descending |det| before
/// rank-to-rank pairing, mirroring the probability sort used for static
/// systems.
pub fn sample_keyframes<R: Rng>(n: usize, rng: &mut R) -> Vec<FunctionKeyframes> {
    let mut start = sample_constrained_sigmas(n, rng);
    let mut end = sample_constrained_sigmas(n, rng);
    let by_det =
        |a: &(f64, f64), b: &(f64, f64)| (b.0 * b.1).partial_cmp(&(a.0 * a.1)).unwrap();
    start.sort_by(by_det);
    end.sort_by(by_det);
    start
        .into_iter()
        .zip(end)
        .map(|(s, e)| {
            let theta_s = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let theta_e = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let phi_s = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let phi_e = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let (txs, tys) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (txe, tye) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let d1 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let d2 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            FunctionKeyframes {
                start: DecomposedKey {
                    sigma1: s.0,
                    sigma2: s.1,
                    theta: theta_s,
                    phi: phi_s,
                    tx: txs,
                    ty: tys,
                },
                end: DecomposedKey {
                    sigma1: e.0,
                    sigma2: e.1,
                    theta: theta_e,
                    phi: phi_e,
                    tx: txe,
                    ty: tye,
                },
                d1,
                d2,
            }
        })
        .collect()
}

/// Sample full animation parameters with linear motion.
pub fn sample_video_decomposed<R: Rng>(rng: &mut R) -> ClipParams {
    let n = rng.random_range(FUNC_RANGE);
    let t = rng.random_range(FRAME_RANGE);
    let funcs = sample_keyframes(n, rng);
    let interps = vec![InterpolantSpec::Linear; n];
    interpolate_keyframes(&funcs, t, &interps, VariationId::IDENTITY)
}

/// Sample full animation parameters with per-function nonlinear motion.
pub fn sample_video_nonlinear<R: Rng>(rng: &mut R) -> ClipParams {
    let n = rng.random_range(FUNC_RANGE);
    let t = rng.random_range(FRAME_RANGE);
    let funcs = sample_keyframes(n, rng);
    let interps = assign_interpolants(n, rng);
    interpolate_keyframes(&funcs, t, &interps, VariationId::IDENTITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use std::f64::consts::PI;

    #[test]
    fn linear_endpoints() {
        assert_eq!(eval_interpolant(&InterpolantSpec::Linear, 0.0), 0.0);
        assert_eq!(eval_interpolant(&InterpolantSpec::Linear, 1.0), 1.0);
    }

    #[test]
    fn sharp_piecewise() {
        let s = InterpolantSpec::Sharp { start: 0.4, width: 0.1 };
        assert_eq!(eval_interpolant(&s, 0.2), 0.0);
        assert!((eval_interpolant(&s, 0.45) - 0.5).abs() < 1e-12);
        assert_eq!(eval_interpolant(&s, 0.9), 1.0);
    }

    #[test]
    fn sinusoidal_half_cycle_peak() {
        let s = InterpolantSpec::Sinusoidal {
            cycles: 1,
            noise: RandomCurve { values: vec![0.0; 4] },
            noise_amp: 0.0,
        };
        assert!((eval_interpolant(&s, 0.5) - 1.0).abs() < 1e-12);
        assert_eq!(eval_interpolant(&s, 0.0), 0.0);
    }

    #[test]
    fn all_kinds_start_at_zero_and_stay_in_range() {
        let mut rng = seeded_rng(5);
        for _ in 0..100 {
            for spec in [
                InterpolantSpec::Linear,
                sample_sinusoidal(&mut rng),
                sample_sharp(&mut rng),
                sample_random_interp(&mut rng),
            ] {
                assert_eq!(eval_interpolant(&spec, 0.0), 0.0, "{spec:?}");
                for k in 0..=20 {
                    let v = eval_interpolant(&spec, k as f64 / 20.0);
                    assert!((0.0..=1.0).contains(&v), "{spec:?} at {k}");
                }
            }
        }
    }

    #[test]
    fn interpolant_set_size_and_linear_origin() {
        let mut rng = seeded_rng(8);
        for _ in 0..10_000 {
            let set = build_interpolant_set(&mut rng);
            assert!(set.len() == 2 || set.len() == 3);
            assert_eq!(set[0], InterpolantSpec::Linear);
        }
    }

    #[test]
    fn single_interpolant_mode_exists() {
        let mut rng = seeded_rng(2);
        let mut saw_uniform = false;
        let mut saw_mixed = false;
        for _ in 0..200 {
            let specs = assign_interpolants(6, &mut rng);
            if specs.iter().all(|s| *s == specs[0]) {
                saw_uniform = true;
            } else {
                saw_mixed = true;
            }
        }
        assert!(saw_uniform && saw_mixed);
    }

    #[test]
    fn sampled_shapes_in_range() {
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let p = sample_video_decomposed(&mut rng);
            assert!(FRAME_RANGE.contains(&p.frames()));
            assert!(FUNC_RANGE.contains(&p.funcs()));
            assert_eq!(p.tensor().len(), p.frames() * p.funcs() * 6);
            assert!(p.all_contractive());
        }
    }

    #[test]
    fn nonlinear_clips_stay_contractive() {
        let mut rng = seeded_rng(4);
        for _ in 0..50 {
            let p = sample_video_nonlinear(&mut rng);
            assert!(p.all_contractive());
        }
    }

    #[test]
    fn linear_angle_midpoint() {
        let key = |theta: f64| DecomposedKey {
            sigma1: 0.6,
            sigma2: 0.4,
            theta,
            phi: 0.0,
            tx: 0.0,
            ty: 0.0,
        };
        let funcs = vec![
            FunctionKeyframes { start: key(0.0), end: key(PI), d1: 1.0, d2: 1.0 },
            FunctionKeyframes { start: key(0.0), end: key(PI), d1: 1.0, d2: 1.0 },
        ];
        let p = interpolate_keyframes(
            &funcs,
            3,
            &[InterpolantSpec::Linear, InterpolantSpec::Linear],
            VariationId::IDENTITY,
        );
        let mid = compose_key(&key(PI / 2.0), 1.0, 1.0);
        for k in 0..6 {
            assert!((p.row(1, 0)[k] - mid.to_row()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_zero_equals_start_keyframe() {
        let mut rng = seeded_rng(17);
        for _ in 0..20 {
            let n = rng.random_range(FUNC_RANGE);
            let funcs = sample_keyframes(n, &mut rng);
            let interps = assign_interpolants(n, &mut rng);
            let p = interpolate_keyframes(&funcs, 19, &interps, VariationId::IDENTITY);
            for (i, f) in funcs.iter().enumerate() {
                let expect = compose_key(&f.start, f.d1, f.d2).to_row();
                for k in 0..6 {
                    assert!((p.row(0, i)[k] - expect[k]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn last_frame_equals_end_keyframe_when_linear() {
        let mut rng = seeded_rng(18);
        let funcs = sample_keyframes(4, &mut rng);
        let interps = vec![InterpolantSpec::Linear; 4];
        let p = interpolate_keyframes(&funcs, 20, &interps, VariationId::IDENTITY);
        for (i, f) in funcs.iter().enumerate() {
            let expect = compose_key(&f.end, f.d1, f.d2).to_row();
            for k in 0..6 {
                assert!((p.row(19, i)[k] - expect[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn seed_determines_params() {
        let a = sample_video_nonlinear(&mut seeded_rng(123));
        let b = sample_video_nonlinear(&mut seeded_rng(123));
        assert_eq!(a, b);
    }

    #[test]
    fn flat_interpolation_shares_endpoints() {
        let p = sample_video_decomposed(&mut seeded_rng(7));
        let flat = p.flat_interpolated();
        let last = p.frames() - 1;
        for n in 0..p.funcs() {
            for k in 0..6 {
                assert_eq!(p.row(0, n)[k], flat.row(0, n)[k]);
                assert_eq!(p.row(last, n)[k], flat.row(last, n)[k]);
            }
        }
        // flat interpolation of contractive endpoints is still contractive
        // (operator norm is convex)
        assert!(flat.all_contractive());
    }
}
