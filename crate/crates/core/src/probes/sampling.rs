//! Deterministic sample sets.
//!
//! Random draws are counter-based: sample `i` of seed `s` always comes from
//! stream `i` of a ChaCha generator keyed by `s`, so any partition of the
//! indices across workers yields the same values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::SpatialPoint;

/// `K` uniforms in `[0, 1)` for sample `index` under `seed`.
pub fn uniforms<const K: usize>(seed: u64, index: u64) -> [f64; K] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    std::array::from_fn(|_| rng.random::<f64>())
}

/// Uniform point of an axis-aligned box.
pub fn uniform_in_box(lo: &[f64], hi: &[f64], seed: u64, index: u64) -> [f64; 3] {
    let u: [f64; 3] = uniforms(seed, index);
    let mut out = [0.0; 3];
    for axis in 0..lo.len() {
        out[axis] = lo[axis] + u[axis] * (hi[axis] - lo[axis]);
    }
    out
}

/// Uniform point of the unit disk (`dim = 2`) or unit ball (`dim = 3`).
pub fn uniform_in_unit_ball(dim: usize, seed: u64, index: u64) -> [f64; 3] {
    let u: [f64; 3] = uniforms(seed, index);
    if dim == 2 {
        let r = u[0].sqrt();
        let th = std::f64::consts::TAU * u[1];
        [r * th.cos(), r * th.sin(), 0.0]
    } else {
        let r = u[0].cbrt();
        let z = 2.0 * u[1] - 1.0;
        let th = std::f64::consts::TAU * u[2];
        let s = (1.0 - z * z).max(0.0).sqrt();
        [r * s * th.cos(), r * s * th.sin(), r * z]
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653_3;

/// Fibonacci lattice of `n` unit vectors. With a seed, each point is jittered
/// inside its latitude band and azimuth slot.
pub fn fibonacci_sphere(n: usize, seed: Option<u64>) -> Vec<SpatialPoint> {
    let nf = n as f64;
    let slot = std::f64::consts::TAU / nf.sqrt().max(1.0);
    (0..n)
        .map(|i| {
            let (dz, dphi) = match seed {
                Some(s) => {
                    let [a, b] = uniforms::<2>(s, i as u64);
                    (a, b - 0.5)
                }
                None => (0.5, 0.0),
            };
            let z = 1.0 - 2.0 * (i as f64 + dz) / nf;
            let phi = GOLDEN_ANGLE * i as f64 + dphi * slot;
            let s = (1.0 - z * z).max(0.0).sqrt();
            SpatialPoint::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniforms_are_counter_based() {
        let a: [f64; 2] = uniforms(7, 3);
        let b: [f64; 2] = uniforms(7, 3);
        let c: [f64; 2] = uniforms(7, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(500, Some(1)) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        let plain = fibonacci_sphere(100, None);
        let z_mean: f64 = plain.iter().map(|p| p.z).sum::<f64>() / 100.0;
        assert!(z_mean.abs() < 1e-12);
    }

    #[test]
    fn ball_samples_stay_inside() {
        for i in 0..1000 {
            let p = uniform_in_unit_ball(3, 5, i);
            assert!(p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
            let q = uniform_in_unit_ball(2, 5, i);
            assert!(q[0].hypot(q[1]) <= 1.0 + 1e-12);
        }
    }
}
